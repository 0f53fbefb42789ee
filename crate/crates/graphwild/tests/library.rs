use std::path::Path;
use std::sync::Arc;

use graphwild::graph::Graph;
use graphwild::inference::{infer, InferError, InferOptions, Mode, Query, Retriever, Route, StubClient, GenerationContext};
use graphwild::library::{build_index, load_csv, read_csv, retrieve, retrieve_similarity, EmbeddingProvider, HashingEmbedder, Index, LibraryError, INDEX_FILE};
use graphwild::prompt::GraphText;
use graphwild::sandbox::{ExecStatus, GraphPayload};
use graphwild::tasks::{Answer, Params, TaskId};

fn fixture_index() -> (Index, HashingEmbedder) {
    let e = HashingEmbedder::default();
    let docs = load_csv(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/library.csv")).unwrap();
    (build_index(docs, &e).unwrap(), e)
}

#[test]
fn csv_errors_name_the_row() {
    let err = read_csv("name,document\nx,y\n".as_bytes()).unwrap_err();
    assert!(matches!(&err, LibraryError::CsvError { row: 0, message } if message.contains("task_name")), "{err}");
    let err = read_csv("task_name,document\na,first\n ,second\n".as_bytes()).unwrap_err();
    assert!(matches!(err, LibraryError::CsvError { row: 2, .. }), "{err}");
    assert!(matches!(read_csv("task_name,document\n".as_bytes()), Err(LibraryError::EmptyLibrary)));
    let docs = read_csv("document,task_name\n\"a, quoted\nbody\",bfs\n".as_bytes()).unwrap();
    assert_eq!((docs[0].task_name.as_str(), docs[0].document.as_str()), ("bfs", "a, quoted\nbody"));
}

#[test]
fn index_round_trips_through_disk() {
    let (idx, e) = fixture_index();
    let dir = tempfile::tempdir().unwrap();
    idx.save(dir.path()).unwrap();
    assert!(dir.path().join(INDEX_FILE).is_file());
    let back = Index::load(dir.path()).unwrap();
    assert_eq!(back, idx);
    let q = "compute the k core decomposition";
    assert_eq!(retrieve(&back, &e, q, 3, None).unwrap(), retrieve(&idx, &e, q, 3, None).unwrap());
}

#[test]
fn a_different_provider_is_refused() {
    let (idx, _) = fixture_index();
    let other = HashingEmbedder { dimension: 64 };
    assert!(matches!(retrieve(&idx, &other, "x", 1, None), Err(LibraryError::ProviderMismatch { .. })));
    assert!(matches!(retrieve_similarity(&idx, &other, "x", 1), Err(LibraryError::ProviderMismatch { .. })));
    let e = HashingEmbedder::default();
    assert!(matches!(retrieve(&idx, &e, "x", 0, None), Err(LibraryError::InvalidK)));
}

#[test]
fn whole_name_match_beats_a_near_duplicate() {
    let (idx, e) = fixture_index();
    let pairs = [
        ("find a maximal clique greedily", "maximal clique"),
        ("find the maximum clique", "maximum clique"),
        ("count weakly connected components", "weakly connected components"),
        ("compute all pairs shortest path distances", "all pairs shortest path"),
    ];
    for (q, want) in pairs {
        let top = &retrieve(&idx, &e, q, 1, None).unwrap()[0];
        assert_eq!(top.task_name, want, "{q}");
        assert!(top.keyword > 1.0);
    }
}

#[test]
fn task_hint_steers_ambiguous_queries() {
    let (idx, e) = fixture_index();
    let hit = &retrieve(&idx, &e, "solve this problem on the graph", 1, Some("euler circuit")).unwrap()[0];
    assert_eq!(hit.task_name, "euler circuit");
}

fn triangle_tail() -> Query {
    let g = Arc::new(Graph::undirected(4, &[(0, 1), (1, 2), (2, 0), (2, 3)]).unwrap());
    Query {
        text: String::new(),
        graph_text: GraphText::Inline("0-1, 1-2, 2-0, 2-3".into()),
        graph: GraphPayload::Inline(g),
        task: None,
        params: Params::new(),
        oracle: None,
    }
}

#[test]
fn in_domain_queries_go_direct() {
    let mut q = triangle_tail();
    q.text = "What is the diameter of this graph?".into();
    q.oracle = Some(Answer::Number(2.0));
    let out = infer(&q, &StubClient::correct(), None, &InferOptions::default(), GenerationContext::default()).unwrap();
    assert_eq!(out.task, TaskId::Diameter);
    assert!(matches!(out.route, Route::Direct));
    assert_eq!((out.verdict.status, out.verdict.grade), (ExecStatus::Ok, Some(true)));
    assert!(out.prompt.contains("2-0"));
}

#[test]
fn out_of_domain_queries_retrieve() {
    let (idx, e) = fixture_index();
    let mut q = triangle_tail();
    q.text = "Find the maximum clique of this graph.".into();
    q.oracle = Some(Answer::Nodes(vec![0, 1, 2]));
    let r = Retriever { index: &idx, provider: &e as &dyn EmbeddingProvider };
    let out = infer(&q, &StubClient::correct(), Some(r), &InferOptions::default(), GenerationContext::default()).unwrap();
    assert_eq!(out.task, TaskId::MaxClique);
    let Route::Rag { hits } = &out.route else { panic!("expected retrieval") };
    assert_eq!(hits[0].task_name, "maximum clique");
    assert!(out.prompt.contains(&hits[0].text));
    assert_eq!(out.verdict.grade, Some(true));

    assert!(matches!(infer(&q, &StubClient::correct(), None, &InferOptions::default(), GenerationContext::default()), Err(InferError::NoIndex)));
    let direct = InferOptions { mode: Mode::Direct, ..InferOptions::default() };
    assert!(matches!(infer(&q, &StubClient::correct(), None, &direct, GenerationContext::default()).unwrap().route, Route::Direct));
}

#[test]
fn unknown_tasks_are_reported() {
    let mut q = triangle_tail();
    q.text = "Tell me something nice about this graph.".into();
    let err = infer(&q, &StubClient::correct(), None, &InferOptions::default(), GenerationContext::default()).unwrap_err();
    assert!(matches!(err, InferError::UnknownTask));
}

#[test]
fn mode_strings_parse() {
    assert_eq!("auto".parse::<Mode>().unwrap(), Mode::Auto);
    assert_eq!("direct".parse::<Mode>().unwrap(), Mode::Direct);
    assert_eq!("rag:3".parse::<Mode>().unwrap(), Mode::Rag(3));
    assert_eq!("rag".parse::<Mode>().unwrap(), Mode::Rag(1));
    assert!("rag:0".parse::<Mode>().is_err());
    assert!("fast".parse::<Mode>().is_err());
}
