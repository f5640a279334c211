use std::io::Cursor;

use handover::trace_io::{digest, encode, read_trace, write_trace, TraceError};
use handover_core::scene::PrimitiveShape;
use handover_core::sim::{audit, run, Scenario};
use handover_core::{Pose, Vec3};

fn scenario(seed: u64) -> Scenario {
    let mut s = Scenario::held_still(
        "trace",
        PrimitiveShape::Cylinder { radius: 0.03, length: 0.2 },
        Pose::from_translation(Vec3::new(0.62, 0.0, 0.3)),
    );
    s.seed = seed;
    s.time_limit = 10.0;
    s
}

#[test]
fn round_trip_preserves_everything() {
    let out = run(&scenario(3)).unwrap();
    let bytes = encode(&out);
    let (header, records) = read_trace(Cursor::new(&bytes)).unwrap();
    assert_eq!(header, out.header);
    assert_eq!(records, out.records);
    audit(&header, &records).unwrap();

    let mut again = Vec::new();
    write_trace(&mut again, &header, &records).unwrap();
    assert_eq!(again, bytes);
}

#[test]
fn header_comes_first() {
    let out = run(&scenario(3)).unwrap();
    let bytes = encode(&out);
    let text = String::from_utf8(bytes).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("{\"header\":"));
    assert_eq!(lines.count(), out.records.len());
}

#[test]
fn digest_is_stable_and_seed_sensitive() {
    let a = digest(&run(&scenario(5)).unwrap());
    let b = digest(&run(&scenario(5)).unwrap());
    let c = digest(&run(&scenario(6)).unwrap());
    assert_eq!(a, b);
    assert_ne!(a, c);
    assert_eq!(a.len(), 64);
    assert!(a.chars().all(|ch| ch.is_ascii_hexdigit()));
}

#[test]
fn read_errors() {
    assert!(matches!(read_trace(Cursor::new(b"")), Err(TraceError::Empty)));
    let out = run(&scenario(1)).unwrap();
    let mut text = String::from_utf8(encode(&out)).unwrap();
    text.push_str("{\"tick\": \"oops\"}\n");
    let n = out.records.len() + 2;
    match read_trace(Cursor::new(text.as_bytes())) {
        Err(TraceError::Json { line, .. }) => assert_eq!(line, n),
        other => panic!("{:?}", other.map(|_| ())),
    }
}

#[test]
fn tampered_trace_fails_audit() {
    let out = run(&scenario(2)).unwrap();
    let mut records = out.records.clone();
    let mid = records.len() / 2;
    records[mid].ee_pose.p.x += 0.05;
    assert!(audit(&out.header, &records).is_err());
}
