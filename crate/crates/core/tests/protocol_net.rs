use std::io::{BufRead, BufReader, Write};
use std::net::{TcpListener, TcpStream};
use std::time::Duration;

use iqp_verify::bitlin::BitVector;
use iqp_verify::model::{Angle, IqpProgram, SecretKey};
use iqp_verify::protocol::wire::{decode, encode, ErrorMsg, SamplesMsg, VerdictMsg};
use iqp_verify::protocol::{
    request, scan_for_leaks, verify_remote, ChallengeMsg, ClientConfig, ErrorCode, ProverKind, ProverServer,
    ServerConfig, WireMessage,
};
use iqp_verify::Error;
use proptest::prelude::*;

fn spawn(kind: ProverKind) -> iqp_verify::protocol::ServerHandle {
    ProverServer::bind("127.0.0.1:0", kind, ServerConfig { seed: 5, ..ServerConfig::default() })
        .unwrap()
        .spawn()
        .unwrap()
}

fn minimal() -> (IqpProgram, SecretKey) {
    let p = IqpProgram::from_strs(4, &["1000", "0110", "0011"], Angle::pi_over_8(1)).unwrap();
    let key = SecretKey::single("1000".parse().unwrap(), std::f64::consts::FRAC_1_SQRT_2).unwrap();
    (p, key)
}

fn raw_exchange(addr: std::net::SocketAddr, line: &str) -> WireMessage {
    let mut stream = TcpStream::connect(addr).unwrap();
    stream.write_all(line.as_bytes()).unwrap();
    let mut reply = String::new();
    BufReader::new(stream).read_line(&mut reply).unwrap();
    decode(&reply).unwrap()
}

#[test]
fn honest_loopback_round_trip_accepts_without_leaking() {
    let server = spawn(ProverKind::Honest);
    let (p, key) = minimal();
    let (report, transcript) =
        verify_remote(server.addr(), &p, &key, 10_000, 0.05, "s-1", false, &ClientConfig::default()).unwrap();
    assert!(report.accept);
    assert!(scan_for_leaks(&transcript.sent, &key).is_empty());
    assert_eq!(String::from_utf8(transcript.sent).unwrap().lines().count(), 1, "no verdict by default");
    server.shutdown();
}

#[test]
fn revealed_verdict_is_the_only_extra_message() {
    let server = spawn(ProverKind::Honest);
    let (p, key) = minimal();
    let (_, transcript) = verify_remote(server.addr(), &p, &key, 500, 0.2, "s-2", true, &ClientConfig::default()).unwrap();
    let sent = String::from_utf8(transcript.sent.clone()).unwrap();
    assert_eq!(sent.lines().count(), 2);
    assert!(matches!(decode(sent.lines().nth(1).unwrap()).unwrap(), WireMessage::Verdict(_)));
    assert!(scan_for_leaks(&transcript.sent, &key).is_empty());
}

#[test]
fn malformed_row_gets_bad_row_reply() {
    let server = spawn(ProverKind::Honest);
    let line = "{\"type\":\"challenge\",\"session\":\"x\",\"n\":2,\"rows\":[\"1z\"],\"angles\":[[1,8]],\"t\":3}\n";
    match raw_exchange(server.addr(), line) {
        WireMessage::Error(ErrorMsg { code, .. }) => assert_eq!(code, "bad-row"),
        other => panic!("unexpected {other:?}"),
    }
    match raw_exchange(server.addr(), "not json\n") {
        WireMessage::Error(ErrorMsg { code, .. }) => assert_eq!(code, "bad-json"),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn oversized_challenge_gets_capacity_refusal() {
    let server = spawn(ProverKind::Honest);
    let p = IqpProgram::identity(30).unwrap();
    match request(server.addr(), &p, 10, "big", &ClientConfig::default()) {
        Err(Error::Protocol { code, .. }) => assert_eq!(code, "capacity"),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn identity_challenge_gives_zero_samples() {
    let server = spawn(ProverKind::Honest);
    let p = IqpProgram::identity(3).unwrap();
    let (samples, _) = request(server.addr(), &p, 20, "id", &ClientConfig::default()).unwrap();
    assert!(samples.iter().all(BitVector::is_zero));
}

/// A misbehaving prover that replies with a fixed message.
fn fake_prover(reply: impl Fn(&ChallengeMsg) -> WireMessage + Send + 'static) -> std::net::SocketAddr {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    std::thread::spawn(move || {
        let (stream, _) = listener.accept().unwrap();
        let mut reader = BufReader::new(stream.try_clone().unwrap());
        let mut line = String::new();
        reader.read_line(&mut line).unwrap();
        let WireMessage::Challenge(c) = decode(&line).unwrap() else { panic!("expected challenge") };
        let mut w = stream;
        w.write_all(encode(&reply(&c)).as_bytes()).unwrap();
    });
    addr
}

#[test]
fn wrong_sample_count_is_rejected_before_judging() {
    let addr = fake_prover(|c| WireMessage::Samples(SamplesMsg { session: c.session.clone(), bits: vec!["0000".into(); 3] }));
    let (p, key) = minimal();
    match verify_remote(addr, &p, &key, 5, 0.1, "cnt", false, &ClientConfig::default()) {
        Err(Error::Protocol { code, .. }) => assert_eq!(code, ErrorCode::BadCount.as_str()),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn wrong_session_is_rejected() {
    let addr = fake_prover(|c| WireMessage::Samples(SamplesMsg { session: "other".into(), bits: vec!["0000".into(); c.t as usize] }));
    let (p, _) = minimal();
    match request(addr, &p, 4, "mine", &ClientConfig::default()) {
        Err(Error::Protocol { code, .. }) => assert_eq!(code, "session-mismatch"),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn silent_prover_times_out() {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    let hold = std::thread::spawn(move || {
        let conn = listener.accept().unwrap();
        std::thread::sleep(Duration::from_millis(800));
        drop(conn);
    });
    let (p, _) = minimal();
    let config = ClientConfig { timeout: Duration::from_millis(200), ..ClientConfig::default() };
    assert!(matches!(request(addr, &p, 4, "slow", &config), Err(Error::Io(_))));
    hold.join().unwrap();
}

fn wire_message() -> impl Strategy<Value = WireMessage> {
    let session = "[a-z0-9-]{0,36}";
    let bits = proptest::collection::vec("[01]{1,20}", 0..8);
    prop_oneof![
        (session, 1usize..20, bits.clone(), proptest::collection::vec((-50i64..50, 1i64..50), 0..8), 1u64..100_000)
            .prop_map(|(session, n, rows, angles, t)| WireMessage::Challenge(ChallengeMsg { session, n, rows, angles, t })),
        (session, bits).prop_map(|(session, bits)| WireMessage::Samples(SamplesMsg { session, bits })),
        ("[a-z-]{1,20}", ".{0,40}").prop_map(|(code, detail)| WireMessage::Error(ErrorMsg { code, detail })),
        (session, any::<bool>()).prop_map(|(session, accept)| WireMessage::Verdict(VerdictMsg { session, accept })),
    ]
}

proptest! {
    #[test]
    fn codec_round_trips(msg in wire_message()) {
        let line = encode(&msg);
        prop_assert!(line.ends_with('\n'));
        prop_assert_eq!(line.matches('\n').count(), 1);
        prop_assert_eq!(decode(&line).unwrap(), msg);
    }
}
