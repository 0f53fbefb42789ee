//! Render one graph in every format that supports its kind and parse it back.
//!
//!     cargo run --example render_formats

use graphwild::codec::{self, RenderFormat};
use graphwild::graph::{generate_er, ErConfig, GraphKind};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = generate_er(&ErConfig::new(5, 0.5, GraphKind::Undirected, 3)?);
    for format in RenderFormat::all().into_iter().filter(|f| f.supports(g.kind())) {
        let r = codec::render(&g, format, 11)?;
        assert_eq!(codec::parse(&r)?, g);
        println!("== {format}\n{}\n", r.text);
    }
    Ok(())
}
