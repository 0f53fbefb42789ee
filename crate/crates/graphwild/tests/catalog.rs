use graphwild::forge::{build, full_catalog, ForgeConfig, RecordStatus, RejectReason};
use graphwild::tasks::TaskId;

#[test]
fn every_reference_program_agrees_with_the_oracle() {
    let mut cfg = ForgeConfig::uniform(11, TaskId::ALL, 25);
    cfg.jobs = 2;
    let out = build(&cfg, &full_catalog()).unwrap();
    let bad: Vec<String> = out
        .records
        .iter()
        .filter_map(|r| match &r.status {
            RecordStatus::Verified => None,
            s => Some(format!("{} {:?} params={:?} oracle={}\n{}", r.task_id, s, r.params, r.oracle_answer.to_line(), r.rendering.text)),
        })
        .collect();
    assert!(bad.is_empty(), "{} rejected:\n{}", bad.len(), bad.join("\n---\n"));
    eprintln!("{}", serde_json::to_string(&out.report).unwrap());
    for t in TaskId::ALL {
        assert!(out.report.per_task[t].verified > 0, "{t} produced nothing");
    }
}

#[test]
fn a_broken_program_is_rejected() {
    let mut cat = full_catalog();
    for d in &mut cat {
        d.solution_code.push_str("\nanswer=null\n");
    }
    let cfg = ForgeConfig::uniform(5, &[TaskId::Connectivity, TaskId::MaxClique], 6);
    let out = build(&cfg, &cat).unwrap();
    assert_eq!(out.report.clean.verified, 0);
    assert!(out.records.iter().all(|r| matches!(&r.status, RecordStatus::Rejected { reason: RejectReason::WrongAnswer, .. })));
}
