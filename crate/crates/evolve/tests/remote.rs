use std::sync::{Arc, Mutex};
use std::thread;
use std::time::Duration;

use stowage_evolve::{Generator, GeneratorError, GeneratorRequest, Operator, RemoteConfig, RemoteGenerator};
use tiny_http::{Response, Server};

/// Serves `script` in order, one response per request, recording bodies.
fn serve(script: Vec<(u16, String)>) -> (String, Arc<Mutex<Vec<String>>>, thread::JoinHandle<()>) {
    let server = Server::http("127.0.0.1:0").unwrap();
    let url = format!("http://{}/v1", server.server_addr().to_ip().unwrap());
    let bodies = Arc::new(Mutex::new(Vec::new()));
    let seen = bodies.clone();
    let h = thread::spawn(move || {
        for (status, body) in script {
            let mut req = server.recv().unwrap();
            let mut text = String::new();
            req.as_reader().read_to_string(&mut text).unwrap();
            seen.lock().unwrap().push(format!("{} {}", req.url(), text));
            req.respond(Response::from_string(body).with_status_code(status)).unwrap();
        }
    });
    (url, bodies, h)
}

fn completion(content: &str) -> String {
    serde_json::json!({ "choices": [{ "message": { "role": "assistant", "content": content } }] }).to_string()
}

fn config(url: String, retries: u32) -> RemoteConfig {
    RemoteConfig { max_retries: retries, backoff: Duration::from_millis(5), ..RemoteConfig::new(url, "test-model") }
}

fn init() -> GeneratorRequest {
    GeneratorRequest::operator(Operator::E1, vec![]).unwrap()
}

#[test]
fn canned_reply_is_parsed_and_journaled() {
    let (url, bodies, h) = serve(vec![(200, completion("{Fill gaps.}\n```\nvol_util - 0.1 * waste\n```"))]);
    let dir = tempfile::tempdir().unwrap();
    let journal = dir.path().join("journal.jsonl");
    let mut g = RemoteGenerator::new(config(url, 0)).unwrap().with_journal(&journal).unwrap();
    let r = g.generate(&init()).unwrap();
    h.join().unwrap();
    assert_eq!(r.thought, "Fill gaps.");
    assert_eq!(r.source, "vol_util - 0.1 * waste");
    let sent = bodies.lock().unwrap()[0].clone();
    assert!(sent.starts_with("/v1/chat/completions "));
    assert!(sent.contains("\"model\":\"test-model\""));
    let lines: Vec<serde_json::Value> =
        std::fs::read_to_string(&journal).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 1);
    assert_eq!(lines[0]["status"], "ok");
    assert_eq!(lines[0]["template"], "init");
    assert_eq!(lines[0]["kind"], "E1");
}

#[test]
fn server_errors_are_retried() {
    let (url, _, h) = serve(vec![(500, "busy".into()), (429, "slow down".into()), (200, completion("```\nvol_util\n```"))]);
    let mut g = RemoteGenerator::new(config(url, 3)).unwrap();
    assert_eq!(g.generate(&init()).unwrap().source, "vol_util");
    h.join().unwrap();
}

#[test]
fn exhausted_retries_are_unreachable() {
    let (url, _, h) = serve(vec![(503, "down".into()), (200, "not json".into())]);
    let mut g = RemoteGenerator::new(config(url, 1)).unwrap();
    match g.generate(&init()) {
        Err(GeneratorError::Unreachable { attempts, last }) => {
            assert_eq!(attempts, 2);
            assert!(last.contains("malformed"));
        }
        other => panic!("{other:?}"),
    }
    h.join().unwrap();
}

#[test]
fn client_errors_are_not_retried() {
    let (url, _, h) = serve(vec![(401, "bad key".into())]);
    let mut g = RemoteGenerator::new(config(url, 3)).unwrap();
    assert!(matches!(g.generate(&init()), Err(GeneratorError::Rejected { status: 401, .. })));
    h.join().unwrap();
}
