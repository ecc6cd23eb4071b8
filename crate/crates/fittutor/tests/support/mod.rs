//! Helpers shared by the integration test targets.
#![allow(dead_code)]

use std::path::PathBuf;
use std::time::Duration;

use fittutor_core::{BodyPart, Keypoint, PoseFrame};
use futures_util::{SinkExt, StreamExt};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tokio::net::TcpStream;
use tokio_tungstenite::tungstenite::Message;
use tokio_tungstenite::{MaybeTlsStream, WebSocketStream};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

pub fn read_fixture(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).unwrap()
}

/// Compares `actual` with a golden file; `UPDATE_GOLDEN=1` rewrites it.
pub fn check_golden(name: &str, actual: &str) -> Result<(), String> {
    let path = golden(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, actual).unwrap();
    }
    let expected = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    if expected == actual {
        Ok(())
    } else {
        Err(format!("{} differs:\n--- expected\n{expected}\n--- actual\n{actual}", path.display()))
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A frame with uniformly random joints, some of them off-screen.
pub fn random_frame(rng: &mut impl Rng, t: i64) -> PoseFrame {
    let (w, h) = (640.0, 480.0);
    let kps = BodyPart::ALL.map(|p| {
        Keypoint::new(p, rng.gen_range(-0.2 * w..1.2 * w), rng.gen_range(-0.2 * h..1.2 * h), rng.gen_range(0.0..=1.0))
    });
    PoseFrame::new(t, w, h, kps).unwrap()
}

/// `base` with every joint nudged by up to `amount` pixels.
pub fn jitter(rng: &mut impl Rng, base: &PoseFrame, amount: f64, t: i64) -> PoseFrame {
    base.with_timestamp(t)
        .map_positions(|_, p| {
            fittutor_core::Point::new(p.x + rng.gen_range(-amount..=amount), p.y + rng.gen_range(-amount..=amount))
        })
        .unwrap()
}

pub type Ws = WebSocketStream<MaybeTlsStream<TcpStream>>;

/// Starts a server on an ephemeral port and returns its address.
pub async fn spawn_server(store: std::sync::Arc<dyn fittutor::wire::ReferenceStore>) -> std::net::SocketAddr {
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    tokio::spawn(fittutor::server::serve(listener, store));
    addr
}

pub async fn connect(addr: std::net::SocketAddr) -> Ws {
    let (ws, _) = tokio_tungstenite::connect_async(format!("ws://{addr}")).await.unwrap();
    ws
}

pub async fn send(ws: &mut Ws, text: &str) {
    ws.send(Message::text(text.to_owned())).await.unwrap();
}

/// Next text message, or `None` once the server closes.
pub async fn recv(ws: &mut Ws) -> Option<String> {
    loop {
        let msg = tokio::time::timeout(Duration::from_secs(10), ws.next()).await.expect("server reply timed out");
        match msg {
            Some(Ok(Message::Text(t))) => return Some(t.as_str().to_owned()),
            Some(Ok(Message::Close(_))) | None | Some(Err(_)) => return None,
            Some(Ok(_)) => continue,
        }
    }
}

/// Plays a client script and records the exchange. Lines starting with `>`
/// were sent, `<` received; `[closed]` marks the server ending the session.
/// After each sent message the expected number of replies is read.
pub async fn run_script(addr: std::net::SocketAddr, script: &[(String, usize)]) -> String {
    let mut ws = connect(addr).await;
    let mut transcript = String::new();
    for (msg, replies) in script {
        transcript.push_str(&format!("> {msg}\n"));
        send(&mut ws, msg).await;
        for _ in 0..*replies {
            match recv(&mut ws).await {
                Some(r) => transcript.push_str(&format!("< {r}\n")),
                None => break,
            }
        }
    }
    if recv(&mut ws).await.is_none() {
        transcript.push_str("[closed]\n");
    }
    transcript
}

pub fn fixture_frame(name: &str) -> PoseFrame {
    fittutor::parse_frame(&read_fixture(name)).unwrap()
}

pub fn stream_frames() -> Vec<PoseFrame> {
    read_fixture("stream.jsonl").lines().map(|l| fittutor::parse_frame(l).unwrap()).collect()
}

/// A directory store holding default-config references built from the
/// canonical fixtures. Keep the directory alive while the store is in use.
pub fn fixture_store() -> (tempfile::TempDir, std::sync::Arc<dyn fittutor::wire::ReferenceStore>) {
    let dir = tempfile::tempdir().unwrap();
    for name in ["t_pose", "warrior", "squat", "arms_up"] {
        let r = fittutor_core::ReferencePose::new(
            name,
            fixture_frame(&format!("{name}.json")),
            fittutor_core::ComparisonConfig::default(),
        );
        std::fs::write(dir.path().join(format!("{name}.json")), fittutor::serialize_reference(&r)).unwrap();
    }
    let store = std::sync::Arc::new(fittutor::wire::DirectoryStore::new(dir.path()));
    (dir, store)
}

pub fn hello_named(name: &str, debounce: u32) -> String {
    use fittutor::wire::{Hello, ReferenceSource, WireMessage};
    WireMessage::Hello(Hello {
        reference: ReferenceSource::Named(name.into()),
        comparison: None,
        debounce_frames: debounce,
    })
    .encode()
}

pub fn frame_msg(f: &PoseFrame) -> String {
    fittutor::wire::WireMessage::Frame(Box::new(f.clone())).encode()
}

pub fn close_msg() -> String {
    fittutor::wire::WireMessage::Close.encode()
}

/// Like [`run_script`] over several connections at once. Each step names
/// the connection it uses; transcript lines carry that connection's label.
pub async fn run_interleaved(addr: std::net::SocketAddr, labels: &[&str], steps: &[(usize, String, usize)]) -> String {
    let mut conns = Vec::new();
    for _ in labels {
        conns.push(connect(addr).await);
    }
    let mut transcript = String::new();
    for (c, msg, replies) in steps {
        transcript.push_str(&format!("{}> {msg}\n", labels[*c]));
        send(&mut conns[*c], msg).await;
        for _ in 0..*replies {
            match recv(&mut conns[*c]).await {
                Some(r) => transcript.push_str(&format!("{}< {r}\n", labels[*c])),
                None => break,
            }
        }
    }
    for (label, ws) in labels.iter().zip(&mut conns) {
        if recv(ws).await.is_none() {
            transcript.push_str(&format!("{label} [closed]\n"));
        }
    }
    transcript
}

/// The scripted client sessions with golden transcripts, run against a
/// fresh server. Returns `(golden file name, transcript)` pairs.
pub async fn protocol_transcripts() -> Vec<(&'static str, String)> {
    let (_dir, store) = fixture_store();
    let addr = spawn_server(store).await;
    let frames = stream_frames();
    let corrupt = read_fixture("stream_corrupt.jsonl").lines().nth(4).unwrap().to_owned();
    let mut out = Vec::new();

    let happy = vec![
        (hello_named("t_pose", 0), 0),
        (frame_msg(&frames[0]), 1),
        (frame_msg(&frames[2]), 1),
        (frame_msg(&frames[8]), 1),
        (close_msg(), 1),
    ];
    out.push(("protocol_happy.txt", run_script(addr, &happy).await));

    let no_hello = vec![(frame_msg(&fixture_frame("t_pose.json")), 1)];
    out.push(("protocol_no_hello.txt", run_script(addr, &no_hello).await));

    let bad_frame = vec![
        (hello_named("t_pose", 0), 0),
        (frame_msg(&frames[1]), 1),
        (format!(r#"{{"type":"frame","frame":{corrupt}"#), 1),
        (r#"{"type":"frame","frame":{"t":1,"w":640.0,"h":480.0,"keypoints":[]}}"#.to_owned(), 1),
        (frame_msg(&frames[3]), 1),
        (close_msg(), 1),
    ];
    out.push(("protocol_bad_frame.txt", run_script(addr, &bad_frame).await));

    // two sessions on different references, one debounced, messages interleaved
    let concurrent = vec![
        (0, hello_named("t_pose", 0), 0),
        (1, hello_named("warrior", 2), 0),
        (0, frame_msg(&frames[2]), 1),
        (1, frame_msg(&frames[2]), 1),
        (1, frame_msg(&frames[2]), 1),
        (0, frame_msg(&frames[0]), 1),
        (1, frame_msg(&frames[0]), 1),
        (0, close_msg(), 1),
        (1, frame_msg(&fixture_frame("warrior.json")), 1),
        (1, close_msg(), 1),
    ];
    out.push(("protocol_concurrent.txt", run_interleaved(addr, &["A", "B"], &concurrent).await));
    out
}
