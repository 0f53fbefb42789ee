//! Versioned catalog of real-life scenario templates.
//!
//! Each template maps node ids to entity names drawn from a fixed pool and
//! edges to a relation sentence. Names within one rendering are distinct, so
//! the text can always be mapped back to node ids.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub const CATALOG_VERSION: &str = "scenario-catalog/v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Domain {
    ComputerScience,
    Data,
    Bioinformatics,
    Finance,
    Logistics,
    Chemistry,
    WebAnalysis,
    Physics,
}

impl Domain {
    pub const ALL: [Domain; 8] = [
        Domain::ComputerScience,
        Domain::Data,
        Domain::Bioinformatics,
        Domain::Finance,
        Domain::Logistics,
        Domain::Chemistry,
        Domain::WebAnalysis,
        Domain::Physics,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Domain::ComputerScience => "computer-science",
            Domain::Data => "data",
            Domain::Bioinformatics => "bioinformatics",
            Domain::Finance => "finance",
            Domain::Logistics => "logistics",
            Domain::Chemistry => "chemistry",
            Domain::WebAnalysis => "web-analysis",
            Domain::Physics => "physics",
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for Domain {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Domain::ALL
            .into_iter()
            .find(|d| d.name() == s)
            .ok_or_else(|| format!("unknown scenario domain {s:?}"))
    }
}

/// One invertible scenario template.
///
/// Relation patterns use `{a}` and `{b}` for the two entity names and
/// `{w}` for the weight.
#[derive(Debug)]
pub struct ScenarioTemplate {
    pub domain: Domain,
    pub id: u8,
    pub setting: &'static str,
    pub singular: &'static str,
    pub plural: &'static str,
    pub names: &'static [&'static str],
    pub mutual: &'static str,
    pub one_way: &'static str,
    pub weight_clause: &'static str,
}

const GREEK: &[&str] = &[
    "Alpha", "Beta", "Gamma", "Delta", "Epsilon", "Zeta", "Eta", "Theta", "Iota", "Kappa",
    "Lambda", "Mu", "Nu", "Xi", "Omicron", "Pi", "Rho", "Sigma", "Tau", "Upsilon", "Phi", "Chi",
    "Psi", "Omega",
];

const TREES: &[&str] = &[
    "Alder", "Birch", "Cedar", "Dogwood", "Elm", "Fir", "Ginkgo", "Hazel", "Ironwood", "Juniper",
    "Kapok", "Larch", "Maple", "Nutmeg", "Oak", "Pine", "Quince", "Rowan", "Spruce", "Teak",
    "Upas", "Viburnum", "Willow", "Yew",
];

const CITIES: &[&str] = &[
    "Aberdeen", "Bergen", "Calais", "Dresden", "Essen", "Faro", "Genoa", "Hamburg", "Izmir",
    "Jena", "Kiel", "Lyon", "Malaga", "Nantes", "Oslo", "Porto", "Quimper", "Riga", "Split",
    "Turin", "Utrecht", "Valencia", "Warsaw", "Zurich",
];

const GENES: &[&str] = &[
    "Abl", "Brca", "Cdk", "Dlx", "Egfr", "Fos", "Gata", "Hox", "Irf", "Jak", "Kras", "Lck",
    "Myc", "Notch", "Otx", "Pax", "Rb", "Sox", "Tp", "Ubx", "Vhl", "Wnt", "Xist", "Zic",
];

const ELEMENTS: &[&str] = &[
    "Argon", "Boron", "Carbon", "Dysprosium", "Erbium", "Fluorine", "Gallium", "Helium",
    "Iodine", "Krypton", "Lithium", "Magnesium", "Neon", "Oxygen", "Phosphorus", "Radon",
    "Sodium", "Titanium", "Uranium", "Vanadium", "Xenon", "Yttrium", "Zinc", "Cobalt",
];

const SITES: &[&str] = &[
    "Atlas", "Beacon", "Compass", "Dynamo", "Ember", "Falcon", "Glacier", "Harbor", "Indigo",
    "Jasper", "Kestrel", "Lumen", "Meridian", "Nimbus", "Orbit", "Prism", "Quasar", "Radiant",
    "Summit", "Tundra", "Umbra", "Vertex", "Wander", "Zenith",
];

const TEMPLATES: &[ScenarioTemplate] = &[
    ScenarioTemplate {
        domain: Domain::ComputerScience,
        id: 0,
        setting: "a distributed computing cluster",
        singular: "server",
        plural: "servers",
        names: GREEK,
        mutual: "Server {a} and server {b} share a network link",
        one_way: "Server {a} forwards requests to server {b}",
        weight_clause: " with a latency of {w} ms",
    },
    ScenarioTemplate {
        domain: Domain::Data,
        id: 0,
        setting: "a data lineage catalog",
        singular: "table",
        plural: "tables",
        names: TREES,
        mutual: "Table {a} and table {b} are joined on a shared key",
        one_way: "Table {a} feeds rows into table {b}",
        weight_clause: " at a cost of {w} units",
    },
    ScenarioTemplate {
        domain: Domain::Bioinformatics,
        id: 0,
        setting: "a protein interaction study",
        singular: "protein",
        plural: "proteins",
        names: GENES,
        mutual: "Protein {a} binds with protein {b}",
        one_way: "Protein {a} regulates protein {b}",
        weight_clause: " with an affinity score of {w}",
    },
    ScenarioTemplate {
        domain: Domain::Finance,
        id: 0,
        setting: "an interbank lending market",
        singular: "bank",
        plural: "banks",
        names: TREES,
        mutual: "Bank {a} and bank {b} hold a bilateral credit line",
        one_way: "Bank {a} lends money to bank {b}",
        weight_clause: " worth {w} million dollars",
    },
    ScenarioTemplate {
        domain: Domain::Logistics,
        id: 0,
        setting: "a regional freight network",
        singular: "city",
        plural: "cities",
        names: CITIES,
        mutual: "A road connects {a} and {b}",
        one_way: "A one-way rail line runs from {a} to {b}",
        weight_clause: " with a capacity of {w} trucks per day",
    },
    ScenarioTemplate {
        domain: Domain::Chemistry,
        id: 0,
        setting: "a molecular bonding model",
        singular: "atom",
        plural: "atoms",
        names: ELEMENTS,
        mutual: "Atom {a} forms a bond with atom {b}",
        one_way: "Atom {a} donates an electron to atom {b}",
        weight_clause: " with a bond energy of {w} units",
    },
    ScenarioTemplate {
        domain: Domain::WebAnalysis,
        id: 0,
        setting: "a web crawl snapshot",
        singular: "page",
        plural: "pages",
        names: SITES,
        mutual: "Page {a} and page {b} link to each other",
        one_way: "Page {a} contains a hyperlink to page {b}",
        weight_clause: " that was clicked {w} times",
    },
    ScenarioTemplate {
        domain: Domain::Physics,
        id: 0,
        setting: "a coupled oscillator lattice",
        singular: "oscillator",
        plural: "oscillators",
        names: SITES,
        mutual: "Oscillator {a} is coupled to oscillator {b}",
        one_way: "Oscillator {a} drives oscillator {b}",
        weight_clause: " with a coupling strength of {w}",
    },
];

pub fn templates() -> &'static [ScenarioTemplate] {
    TEMPLATES
}

pub fn template(domain: Domain, id: u8) -> Option<&'static ScenarioTemplate> {
    TEMPLATES.iter().find(|t| t.domain == domain && t.id == id)
}

impl ScenarioTemplate {
    /// Distinct entity name for slot `i` of a shuffled pool.
    pub fn entity_name(&self, pool_order: &[usize], i: usize) -> String {
        let len = self.names.len();
        let stem = self.names[pool_order[i % len]];
        match i / len {
            0 => stem.to_string(),
            k => format!("{stem}{}", k + 1),
        }
    }
}
