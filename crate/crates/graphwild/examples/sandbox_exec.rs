//! Execute candidate programs under limits and grade them against an oracle.
//!
//!     cargo run --example sandbox_exec

use std::sync::Arc;

use graphwild::graph::Graph;
use graphwild::sandbox::{execute, execute_batch, ExecJob, Limits};
use graphwild::tasks::{Answer, AnswerType, Params, TaskId};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = Arc::new(Graph::undirected(4, &[(0, 1), (1, 2)])?);
    let params = Params::from([("u".into(), 0), ("v".into(), 3)]);

    // The shim exposes the graph as $N, $EDGE_FILE and PARAM_* variables;
    // the program sets `answer`.
    let code = r#"
reach=" $PARAM_u "
changed=1
while [ $changed = 1 ]; do
  changed=0
  while read -r a b; do
    case "$a" in \#*) continue ;; esac
    for x in "$a $b" "$b $a"; do
      set -- $x
      case "$reach" in *" $1 "*) case "$reach" in *" $2 "*) ;; *) reach="$reach$2 "; changed=1 ;; esac ;; esac
    done
  done < "$EDGE_FILE"
done
case "$reach" in *" $PARAM_v "*) answer=true ;; *) answer=false ;; esac
"#;
    let v = execute(&ExecJob::for_task("reach", code, TaskId::Connectivity, g.clone(), params.clone(), Answer::Bool(false)))?;
    println!("connectivity: {:?} answer={} grade={:?} in {:.3}s", v.status, v.stdout_answer, v.grade, v.wall_time);

    let jobs = vec![
        ExecJob::new("ok", "answer=$N", g.clone(), AnswerType::Number),
        ExecJob::new("syntax", "if then", g.clone(), AnswerType::Number),
        ExecJob::new("unset", "echo hi", g.clone(), AnswerType::Number),
        ExecJob::new("garbage", "answer=lots", g.clone(), AnswerType::Number),
        ExecJob::new("loop", "while :; do :; done", g.clone(), AnswerType::Number).with_limits(Limits { wall_secs: 1.0, ..Limits::default() }),
    ];
    for v in execute_batch(&jobs, 4) {
        let v = v?;
        println!("{:<8} {:?} parsed={:?} malformed={:?}", v.job_id, v.status, v.parsed, v.malformed);
    }
    Ok(())
}
