//! TCP transport: a stateless prover service and the verifier client.
//! One challenge/response exchange per connection.

use std::io::{BufReader, BufWriter, Read, Write};
use std::net::{SocketAddr, TcpListener, TcpStream, ToSocketAddrs};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::thread::{self, JoinHandle};
use std::time::Duration;

use log::{debug, info, warn};

use crate::bitlin::BitVector;
use crate::error::{Error, Result};
use crate::model::{IqpProgram, SecretKey};
use crate::rng;

use super::judge::{judge, VerdictReport};
use super::prover::ProverKind;
use super::wire::{
    read_message, write_message, ChallengeMsg, ErrorCode, VerdictMsg, WireError, WireMessage, MAX_MESSAGE_BYTES,
};

#[derive(Clone, Debug)]
pub struct ServerConfig {
    /// Base seed; each session draws from its own stream.
    pub seed: u64,
    pub read_timeout: Option<Duration>,
    pub max_message: usize,
}

impl Default for ServerConfig {
    fn default() -> Self {
        Self { seed: 0, read_timeout: Some(Duration::from_secs(30)), max_message: MAX_MESSAGE_BYTES }
    }
}

/// FNV-1a, stable across platforms and releases.
fn session_stream(session: &str) -> u64 {
    session.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

pub struct ProverServer {
    listener: TcpListener,
    kind: Arc<ProverKind>,
    config: ServerConfig,
}

impl ProverServer {
    pub fn bind<A: ToSocketAddrs>(addr: A, kind: ProverKind, config: ServerConfig) -> Result<Self> {
        let listener = TcpListener::bind(addr)?;
        Ok(Self { listener, kind: Arc::new(kind), config })
    }

    pub fn local_addr(&self) -> Result<SocketAddr> {
        Ok(self.listener.local_addr()?)
    }

    /// Accepts connections until `stop` is set, one thread per connection.
    fn accept_loop(self, stop: Arc<AtomicBool>) {
        for conn in self.listener.incoming() {
            if stop.load(Ordering::SeqCst) {
                break;
            }
            match conn {
                Ok(stream) => {
                    let kind = Arc::clone(&self.kind);
                    let config = self.config.clone();
                    thread::spawn(move || {
                        if let Err(e) = handle_connection(stream, &kind, &config) {
                            debug!("connection ended with error: {e}");
                        }
                    });
                }
                Err(e) => warn!("accept failed: {e}"),
            }
        }
    }

    /// Serves forever on the current thread.
    pub fn serve(self) {
        info!("prover ({}) listening on {:?}", self.kind.name(), self.listener.local_addr());
        self.accept_loop(Arc::new(AtomicBool::new(false)));
    }

    /// Serves on a background thread until the handle is shut down.
    pub fn spawn(self) -> Result<ServerHandle> {
        let addr = self.local_addr()?;
        let stop = Arc::new(AtomicBool::new(false));
        let flag = Arc::clone(&stop);
        let join = thread::spawn(move || self.accept_loop(flag));
        Ok(ServerHandle { addr, stop, join: Some(join) })
    }
}

pub struct ServerHandle {
    addr: SocketAddr,
    stop: Arc<AtomicBool>,
    join: Option<JoinHandle<()>>,
}

impl ServerHandle {
    pub fn addr(&self) -> SocketAddr {
        self.addr
    }

    pub fn shutdown(mut self) {
        self.stop_inner();
    }

    fn stop_inner(&mut self) {
        if let Some(join) = self.join.take() {
            self.stop.store(true, Ordering::SeqCst);
            // wake the blocking accept
            let _ = TcpStream::connect(self.addr);
            let _ = join.join();
        }
    }
}

impl Drop for ServerHandle {
    fn drop(&mut self) {
        self.stop_inner();
    }
}

fn handle_connection(stream: TcpStream, kind: &ProverKind, config: &ServerConfig) -> Result<()> {
    stream.set_read_timeout(config.read_timeout)?;
    let mut reader = BufReader::new(stream.try_clone()?);
    let mut writer = BufWriter::new(stream);
    let reply = match read_message(&mut reader, config.max_message) {
        Ok(None) => return Ok(()),
        Ok(Some(WireMessage::Challenge(challenge))) => {
            let mut rng = rng::stream(config.seed, session_stream(&challenge.session));
            kind.respond(&challenge, &mut rng).map(WireMessage::Samples).unwrap_or_else(|e| e.to_message())
        }
        Ok(Some(_)) => WireError::new(ErrorCode::UnexpectedMessage, "expected a challenge").to_message(),
        Err(Error::Protocol { code, detail }) => WireMessage::Error(super::wire::ErrorMsg { code, detail }),
        Err(e) => return Err(e),
    };
    let failed = matches!(reply, WireMessage::Error(_));
    write_message(&mut writer, &reply)?;
    if failed {
        return Ok(());
    }
    // optional verdict, then close
    if let Ok(Some(WireMessage::Verdict(v))) = read_message(&mut reader, config.max_message) {
        info!("session {}: verifier reports accept = {}", v.session, v.accept);
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct ClientConfig {
    pub timeout: Duration,
    pub max_message: usize,
}

impl Default for ClientConfig {
    fn default() -> Self {
        Self { timeout: Duration::from_secs(60), max_message: MAX_MESSAGE_BYTES }
    }
}

/// Every byte the verifier wrote and read during one session.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Transcript {
    pub sent: Vec<u8>,
    pub received: Vec<u8>,
}

struct Tee<'a, R> {
    inner: R,
    log: &'a mut Vec<u8>,
}

impl<R: Read> Read for Tee<'_, R> {
    fn read(&mut self, buf: &mut [u8]) -> std::io::Result<usize> {
        let n = self.inner.read(buf)?;
        self.log.extend_from_slice(&buf[..n]);
        Ok(n)
    }
}

/// An open verifier-side connection.
pub struct VerifierSession {
    stream: TcpStream,
    config: ClientConfig,
    transcript: Transcript,
}

impl VerifierSession {
    pub fn connect<A: ToSocketAddrs>(addr: A, config: ClientConfig) -> Result<Self> {
        let addr = addr
            .to_socket_addrs()?
            .next()
            .ok_or_else(|| Error::Io("address resolved to nothing".into()))?;
        let stream = TcpStream::connect_timeout(&addr, config.timeout)?;
        stream.set_read_timeout(Some(config.timeout))?;
        stream.set_write_timeout(Some(config.timeout))?;
        Ok(Self { stream, config, transcript: Transcript::default() })
    }

    fn send(&mut self, msg: &WireMessage) -> Result<()> {
        let line = super::wire::encode(msg);
        self.transcript.sent.extend_from_slice(line.as_bytes());
        self.stream.write_all(line.as_bytes())?;
        self.stream.flush()?;
        Ok(())
    }

    /// Sends the challenge and returns validated samples.
    pub fn exchange(&mut self, challenge: &ChallengeMsg) -> Result<Vec<BitVector>> {
        self.send(&WireMessage::Challenge(challenge.clone()))?;
        let stream = self.stream.try_clone()?;
        let mut reader = BufReader::new(Tee { inner: stream, log: &mut self.transcript.received });
        let reply = read_message(&mut reader, self.config.max_message).map_err(|e| match e {
            Error::Io(detail) => Error::Io(format!("waiting for samples: {detail}")),
            other => other,
        })?;
        match reply {
            Some(WireMessage::Samples(samples)) => Ok(samples.to_bits(challenge)?),
            Some(WireMessage::Error(err)) => Err(Error::Protocol { code: err.code, detail: err.detail }),
            Some(_) => Err(WireError::new(ErrorCode::UnexpectedMessage, "expected samples").into()),
            None => Err(Error::Io("prover closed the connection without replying".into())),
        }
    }

    pub fn send_verdict(&mut self, session: &str, accept: bool) -> Result<()> {
        self.send(&WireMessage::Verdict(VerdictMsg { session: session.to_string(), accept }))
    }

    pub fn transcript(&self) -> &Transcript {
        &self.transcript
    }

    pub fn into_transcript(self) -> Transcript {
        self.transcript
    }
}

/// Fetches `t` samples for `program` from the prover at `addr`.
pub fn request<A: ToSocketAddrs>(
    addr: A,
    program: &IqpProgram,
    t: u64,
    session: &str,
    config: &ClientConfig,
) -> Result<(Vec<BitVector>, Transcript)> {
    let mut conn = VerifierSession::connect(addr, config.clone())?;
    let challenge = ChallengeMsg::from_program(session, program, t);
    let samples = conn.exchange(&challenge)?;
    Ok((samples, conn.into_transcript()))
}

/// Full verifier flow: challenge, samples, local judgment. The verdict is
/// sent back only when `reveal_verdict` is set.
#[allow(clippy::too_many_arguments)]
pub fn verify_remote<A: ToSocketAddrs>(
    addr: A,
    program: &IqpProgram,
    key: &SecretKey,
    t: u64,
    epsilon_acc: f64,
    session: &str,
    reveal_verdict: bool,
    config: &ClientConfig,
) -> Result<(VerdictReport, Transcript)> {
    if key.n() != program.n() {
        return Err(Error::Dimension(format!("key for {} qubits, program on {}", key.n(), program.n())));
    }
    let mut conn = VerifierSession::connect(addr, config.clone())?;
    let challenge = ChallengeMsg::from_program(session, program, t);
    let samples = conn.exchange(&challenge)?;
    let report = judge(key, &samples, epsilon_acc)?;
    if reveal_verdict {
        conn.send_verdict(session, report.accept)?;
    }
    Ok((report, conn.into_transcript()))
}

/// Random session identifier drawn from the caller's rng.
pub fn new_session_id<R: rand::Rng + ?Sized>(rng: &mut R) -> String {
    uuid::Builder::from_random_bytes(rng.random()).into_uuid().to_string()
}
