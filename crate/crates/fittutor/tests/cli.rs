mod support;

use std::path::Path;
use std::process::{Command, Output, Stdio};
use std::io::Write;

use clap::Parser;

use fittutor::{parse_feedback, parse_frame, parse_reference, serialize_feedback, serialize_report, adapt_external_keypoints, AdapterDefaults};
use fittutor_core::{mirror_frame, process_stream, SessionConfig, Status};
use support::{check_golden, fixture, read_fixture};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fittutor"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn extract_to(dir: &Path, fixture_name: &str, extra: &[&str]) -> std::path::PathBuf {
    let out = dir.join("ref.json");
    let mut args = vec!["extract".to_owned(), s(&fixture(fixture_name)).to_owned(), s(&out).to_owned()];
    args.extend(extra.iter().map(|a| a.to_string()));
    let o = bin().args(&args).output().unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    out.to_path_buf()
}

#[test]
fn extract_writes_reference() {
    let dir = tempfile::tempdir().unwrap();
    let out = extract_to(dir.path(), "t_pose.json", &[]);
    let r = parse_reference(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(r.name(), "t_pose");
    assert_eq!(r.profile().len(), 4);
    assert_eq!(r.profile().valid_count(), 4);
    assert_eq!(r.frame(), &parse_frame(&read_fixture("t_pose.json")).unwrap());
}

#[test]
fn extract_honours_flags() {
    let dir = tempfile::tempdir().unwrap();
    let out = extract_to(dir.path(), "warrior.json", &["--pairs", "extended", "--name", "warrior-1", "--tolerance", "0.3"]);
    let r = parse_reference(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(r.name(), "warrior-1");
    assert_eq!(r.profile().len(), 6);
    assert_eq!(r.config().tolerance(), 0.3);
}

#[test]
fn extract_warns_on_invalid_pairs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("z.json");
    let o = run(&["extract", s(&fixture("zero_scores.json")), s(&out)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    check_golden("extract_zero_scores.stderr", &String::from_utf8(o.stderr).unwrap()).unwrap();
    let r = parse_reference(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(r.profile().valid_count(), 0);
}

#[test]
fn extract_error_codes() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["extract", s(&dir.path().join("missing.json")), s(&dir.path().join("r.json"))]);
    assert_eq!(o.status.code(), Some(2));

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"t\": 0, \"w\": 640").unwrap();
    let o = run(&["extract", s(&bad), s(&dir.path().join("r.json"))]);
    assert_eq!(o.status.code(), Some(2));

    let o = run(&["extract", s(&fixture("t_pose.json")), s(&dir.path().join("no/such/dir/r.json"))]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn extract_from_detector_export() {
    let dir = tempfile::tempdir().unwrap();
    let out = extract_to(dir.path(), "posenet_export.json", &["--format", "posenet", "--width", "1280", "--height", "720"]);
    let r = parse_reference(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!((r.frame().width(), r.frame().height()), (1280.0, 720.0));
}

#[test]
fn adapt_matches_library_adapter() {
    let o = run(&["adapt", s(&fixture("posenet_export.json"))]);
    assert_eq!(o.status.code(), Some(0));
    let cli_frame = parse_frame(String::from_utf8(o.stdout).unwrap().trim()).unwrap();
    let lib_frame = adapt_external_keypoints(&read_fixture("posenet_export.json"), AdapterDefaults::default()).unwrap();
    assert_eq!(cli_frame, lib_frame);
    assert_eq!((cli_frame.width(), cli_frame.height(), cli_frame.timestamp_ms()), (640.0, 480.0, 0));
    // same joints as the canonical warrior fixture, different scores
    let warrior = parse_frame(&read_fixture("warrior.json")).unwrap();
    for (a, b) in cli_frame.keypoints().iter().zip(warrior.keypoints()) {
        assert_eq!((a.x, a.y), (b.x, b.y));
        assert_eq!(a.score, 0.87);
    }
}

fn self_stream(n: usize) -> String {
    let line = parse_frame(&read_fixture("t_pose.json")).map(|f| fittutor::serialize_frame(&f)).unwrap();
    (0..n).map(|_| format!("{line}\n")).collect()
}

#[test]
fn compare_self_stream_all_match() {
    let dir = tempfile::tempdir().unwrap();
    let reference = extract_to(dir.path(), "t_pose.json", &[]);
    let frames = dir.path().join("frames.jsonl");
    std::fs::write(&frames, self_stream(5)).unwrap();
    let o = run(&["compare", s(&reference), s(&frames)]);
    assert_eq!(o.status.code(), Some(0));
    let out = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<_> = out.lines().collect();
    assert_eq!(lines.len(), 5);
    for l in lines {
        let fb = parse_feedback(l).unwrap();
        assert!(fb.pairs.iter().all(|p| p.status == Status::Match));
    }
}

#[test]
fn compare_reads_stdin() {
    let dir = tempfile::tempdir().unwrap();
    let reference = extract_to(dir.path(), "t_pose.json", &[]);
    let mut child = bin()
        .args(["compare", s(&reference), "-", "--report"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(self_stream(3).as_bytes()).unwrap();
    let o = child.wait_with_output().unwrap();
    let out = String::from_utf8(o.stdout).unwrap();
    assert_eq!(out.lines().count(), 4);
    assert!(out.lines().last().unwrap().starts_with(r#"{"framesProcessed":3,"framesUsable":3,"fullMatchFrames":3"#));
}

#[test]
fn compare_continues_past_corrupt_lines() {
    let dir = tempfile::tempdir().unwrap();
    let reference = extract_to(dir.path(), "t_pose.json", &[]);
    let o = run(&["compare", s(&reference), s(&fixture("stream_corrupt.jsonl"))]);
    assert_eq!(o.status.code(), Some(0));
    let out = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<_> = out.lines().collect();
    assert_eq!(lines.len(), 10);
    let errors: Vec<_> = lines.iter().filter(|l| l.starts_with("{\"error\"")).collect();
    assert_eq!(errors.len(), 1);
    assert!(errors[0].ends_with("\"line\":5}"));
    assert_eq!(lines.iter().filter(|l| parse_feedback(l).is_ok()).count(), 9);
}

#[test]
fn compare_fixture_stream_golden_and_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let reference = extract_to(dir.path(), "t_pose.json", &[]);
    let stream = fixture("stream.jsonl");
    let args = ["compare", s(&reference), s(&stream), "--report"];
    let first = run(&args);
    let second = run(&args);
    assert_eq!(first.stdout, second.stdout);
    check_golden("compare_stream.jsonl", &String::from_utf8(first.stdout).unwrap()).unwrap();
}

#[test]
fn compare_output_equals_library() {
    let dir = tempfile::tempdir().unwrap();
    let reference_path = extract_to(dir.path(), "t_pose.json", &[]);
    let stream = fixture("stream.jsonl");
    for flags in [&[][..], &["--mode", "angle"][..], &["--pairs", "extended", "--debounce", "2"][..], &["--mirror"][..]] {
        let mut args = vec!["compare", s(&reference_path), s(&stream), "--report"];
        args.extend_from_slice(flags);
        let o = run(&args);
        assert_eq!(o.status.code(), Some(0));

        let parsed = fittutor::cli::Cli::try_parse_from(std::iter::once("fittutor").chain(args.iter().copied())).unwrap();
        let fittutor::cli::Command::Compare(cargs) = parsed.command else { unreachable!() };
        let reference = fittutor::cli::load_reference(&reference_path, &cargs.comparison).unwrap();
        let frames: Vec<_> = read_fixture("stream.jsonl")
            .lines()
            .map(|l| parse_frame(l).unwrap())
            .map(|f| if cargs.mirror { mirror_frame(&f) } else { f })
            .collect();
        let cfg = SessionConfig::new(reference.config().clone(), cargs.debounce);
        let (fbs, report) = process_stream(&frames, &reference, &cfg).unwrap();
        let mut expected: String = fbs.iter().map(|f| serialize_feedback(f) + "\n").collect();
        expected.push_str(&serialize_report(&report));
        expected.push('\n');
        assert_eq!(String::from_utf8(o.stdout).unwrap(), expected, "flags {flags:?}");
    }
}

#[test]
fn compare_writes_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let reference = extract_to(dir.path(), "t_pose.json", &[]);
    let out = dir.path().join("fb.jsonl");
    let o = run(&["compare", s(&reference), s(&fixture("stream.jsonl")), "-o", s(&out)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&out).unwrap().lines().count(), 13);

    let o = run(&["compare", s(&reference), s(&fixture("stream.jsonl")), "-o", s(&dir.path().join("x/y.jsonl"))]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn compare_rejects_bad_reference() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("ref.json");
    std::fs::write(&bad, read_fixture("t_pose.json")).unwrap();
    let o = run(&["compare", s(&bad), s(&fixture("stream.jsonl"))]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
    let o = run(&["compare", s(&dir.path().join("missing.json")), s(&fixture("stream.jsonl"))]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn mirror_flag_swaps_left_right() {
    let dir = tempfile::tempdir().unwrap();
    let reference = extract_to(dir.path(), "t_pose.json", &[]);
    let plain = run(&["compare", s(&reference), s(&fixture("stream.jsonl"))]);
    let mirrored = run(&["compare", s(&reference), s(&fixture("stream.jsonl")), "--mirror"]);
    let plain = String::from_utf8(plain.stdout).unwrap();
    let mirrored = String::from_utf8(mirrored.stdout).unwrap();
    // frame 4 moves the right ankle toward -x; seen in a mirror it is the
    // left ankle moving toward +x
    let p = parse_feedback(plain.lines().nth(4).unwrap()).unwrap();
    let m = parse_feedback(mirrored.lines().nth(4).unwrap()).unwrap();
    assert_eq!(p.status("rightLeg"), Some(Status::MoveLeft));
    assert_eq!(m.status("leftLeg"), Some(Status::MoveRight));
}
