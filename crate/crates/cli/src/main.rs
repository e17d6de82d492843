//! Operator entry points: generate streams, run oracles, prove/verify
//! locally or over the wire, run soundness attack suites, run the INDEX
//! reduction demo, and emit cost reports.
//!
//! Every command prints a versioned JSON report embedding the seeds and
//! field parameters needed to reproduce the run byte-identically.
//!
//! Exit codes: 0 accept/success, 2 soundness rejection, 3 malformed input,
//! 64 usage errors.

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use annostream_core::field::{FieldContext, SchemeKind};
use annostream_core::reduction::{
    self, bob_decide, build_alice_stream, honest_merlin, oracle_decide, ReductionVariant,
};
use annostream_core::stream::{
    accumulate, generate, oracle_bipartite, oracle_connected, oracle_fourcycles_incremental,
    oracle_max_matching, oracle_triangles, parse_text, write_text, GenSpec, StreamHeader,
    StreamUpdate, UpdateModel,
};
use annostream_core::{fourcycles, matching, triangles, Verdict};
use annostream_transport::client::{verify_session, verify_tcp, SessionOutcome};
use annostream_transport::service::{self, AttackMode, DuplexIo};
use annostream_transport::{transcript, TransportError};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use std::io::Read;
use std::net::TcpListener;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "annostream", version, about = "Verifiable graph-stream computation toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a deterministic pseudorandom stream file.
    Gen(GenArgs),
    /// Run a brute-force oracle over a stream file.
    Oracle(OracleArgs),
    /// Produce an annotated-stream file (stream + proof) offline.
    Prove(ProveArgs),
    /// Re-verify an annotated-stream file under a fresh secret.
    Verify(VerifyArgs),
    /// Run the untrusted prover service (TCP or stdio pipe mode).
    Serve(ServeArgs),
    /// Generate a stream and verify it end-to-end against a prover.
    Run(RunArgs),
    /// Measure empirical soundness against adversarial provers.
    Attack(AttackArgs),
    /// Run the INDEX-to-disconnectivity/bipartiteness reduction demo.
    Reduce(ReduceArgs),
    /// Cost and soundness summary across all schemes.
    Report(ReportArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    n: u32,
    #[arg(long)]
    m: u64,
    #[arg(long, default_value_t = 1)]
    b: u32,
    #[arg(long, default_value = "turnstile")]
    model: String,
    #[arg(long, default_value_t = 0.0)]
    deletion_fraction: f64,
    #[arg(long)]
    seed: u64,
    /// Output path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    /// triangles | fourcycles | matching | connectivity | bipartiteness
    #[arg(long)]
    scheme: String,
    /// Stream file (stdin when omitted).
    #[arg(long = "in")]
    input: Option<PathBuf>,
}

#[derive(Args)]
struct ProveArgs {
    #[arg(long)]
    scheme: String,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Challenge seed for the interactive 4-cycle scheme (the recorded
    /// proof is sound only against this pinned challenge).
    #[arg(long, default_value_t = 0)]
    challenge_seed: u64,
}

#[derive(Args)]
struct VerifyArgs {
    /// Annotated-stream file from `prove` or a recorded session.
    #[arg(long = "in")]
    input: PathBuf,
    /// Fresh verifier secret seed.
    #[arg(long)]
    seed: u64,
}

#[derive(Args)]
struct ServeArgs {
    /// TCP port (ANNOSTREAM_PORT or 7117 when omitted).
    #[arg(long)]
    port: Option<u16>,
    /// Serve exactly one session over stdin/stdout instead of TCP.
    #[arg(long, default_value_t = false)]
    stdio: bool,
    /// Adversarial mode: "one-point" corrupts one proof value.
    #[arg(long)]
    attack: Option<String>,
    #[arg(long, default_value_t = 0)]
    attack_section: usize,
    #[arg(long, default_value_t = 1)]
    attack_point: usize,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    scheme: String,
    #[arg(long)]
    n: u32,
    #[arg(long)]
    m: u64,
    #[arg(long, default_value_t = 1)]
    b: u32,
    #[arg(long, default_value_t = 0.0)]
    deletion_fraction: f64,
    /// Stream generator seed.
    #[arg(long)]
    seed: u64,
    /// Verifier secret seed (derived from --seed when omitted).
    #[arg(long)]
    verifier_seed: Option<u64>,
    /// Remote prover endpoint; a prover subprocess is spawned when omitted.
    #[arg(long)]
    endpoint: Option<String>,
    /// Record the session transcript here.
    #[arg(long)]
    transcript: Option<PathBuf>,
}

#[derive(Args)]
struct AttackArgs {
    #[arg(long)]
    scheme: String,
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    /// one-point | phantom-edge | forged-ustar | merged-labels | split-labels
    #[arg(long, default_value = "one-point")]
    corrupt: String,
    #[arg(long)]
    n: u32,
    #[arg(long)]
    m: u64,
    #[arg(long, default_value_t = 1)]
    b: u32,
    #[arg(long, default_value_t = 0.0)]
    deletion_fraction: f64,
    #[arg(long)]
    seed: u64,
    /// Which proof polynomial to corrupt (scheme-specific index).
    #[arg(long, default_value_t = 0)]
    section: usize,
    /// Which value of that polynomial to corrupt.
    #[arg(long, default_value_t = 0)]
    point: usize,
}

#[derive(Args)]
struct ReduceArgs {
    /// disconnectivity | bipartiteness
    #[arg(long)]
    variant: String,
    #[arg(long)]
    n: u32,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 0.5)]
    density: f64,
    /// Target index (random when omitted).
    #[arg(long)]
    i_star: Option<u64>,
    /// Write Alice's XOR stream here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return ExitCode::from(64);
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(classify_error(&err))
        }
    }
}

/// Malformed inputs exit 3; everything else unexpected exits 1.
fn classify_error(err: &anyhow::Error) -> u8 {
    use annostream_core::Error as CoreError;
    for cause in err.chain() {
        if let Some(core) = cause.downcast_ref::<CoreError>() {
            return match core {
                CoreError::MalformedStream(_)
                | CoreError::MalformedProof(_)
                | CoreError::InvalidParameter(_)
                | CoreError::OracleScale { .. } => 3,
                _ => 1,
            };
        }
        if let Some(t) = cause.downcast_ref::<TransportError>() {
            return match t {
                TransportError::MalformedFrame(_) | TransportError::MalformedTranscript(_) => 3,
                TransportError::Core(core) => {
                    return match core {
                        CoreError::MalformedStream(_)
                        | CoreError::MalformedProof(_)
                        | CoreError::InvalidParameter(_) => 3,
                        _ => 1,
                    }
                }
                _ => 1,
            };
        }
        if cause.downcast_ref::<std::io::Error>().is_some() {
            return 1;
        }
    }
    3
}

fn dispatch(command: Command) -> anyhow::Result<ExitCode> {
    match command {
        Command::Gen(args) => cmd_gen(args),
        Command::Oracle(args) => cmd_oracle(args),
        Command::Prove(args) => cmd_prove(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Serve(args) => cmd_serve(args),
        Command::Run(args) => cmd_run(args),
        Command::Attack(args) => cmd_attack(args),
        Command::Reduce(args) => cmd_reduce(args),
        Command::Report(args) => cmd_report(args),
    }
}

fn parse_model(name: &str) -> anyhow::Result<UpdateModel> {
    match name {
        "turnstile" => Ok(UpdateModel::StrictTurnstile),
        "xor" => Ok(UpdateModel::Xor),
        other => Err(anyhow!(annostream_core::Error::InvalidParameter(format!(
            "unknown model '{other}'"
        )))),
    }
}

fn parse_scheme(name: &str) -> anyhow::Result<SchemeKind> {
    match name {
        "triangles" => Ok(SchemeKind::Triangles),
        "matching" => Ok(SchemeKind::Matching),
        "fourcycles" => Ok(SchemeKind::FourCycles),
        other => Err(anyhow!(annostream_core::Error::InvalidParameter(format!(
            "unknown scheme '{other}'"
        )))),
    }
}

fn read_stream(path: Option<&PathBuf>) -> anyhow::Result<(StreamHeader, Vec<StreamUpdate>)> {
    let text = match path {
        Some(p) => std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?,
        None => {
            let mut buf = String::new();
            std::io::stdin().read_to_string(&mut buf)?;
            buf
        }
    };
    Ok(parse_text(&text)?)
}

fn cmd_gen(args: GenArgs) -> anyhow::Result<ExitCode> {
    let spec = GenSpec {
        n: args.n,
        m: args.m,
        b: args.b,
        model: parse_model(&args.model)?,
        deletion_fraction: args.deletion_fraction,
        seed: args.seed,
    };
    let (header, updates) = generate(&spec)?;
    let text = write_text(&header, &updates);
    match &args.out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_oracle(args: OracleArgs) -> anyhow::Result<ExitCode> {
    let (header, updates) = read_stream(args.input.as_ref())?;
    let g = accumulate(&header, &updates)?;
    let value = match args.scheme.as_str() {
        "triangles" => json!(oracle_triangles(&g)),
        "fourcycles" => json!(oracle_fourcycles_incremental(&header, &updates)? as i64),
        "matching" => json!(oracle_max_matching(&g)?.0),
        "connectivity" => json!(oracle_connected(&g)),
        "bipartiteness" => json!(oracle_bipartite(&g)),
        other => {
            return Err(anyhow!(annostream_core::Error::InvalidParameter(format!(
                "unknown oracle '{other}'"
            ))))
        }
    };
    println!(
        "{}",
        json!({
            "report_v": 1,
            "command": "oracle",
            "scheme": args.scheme,
            "n": header.n,
            "b": header.b,
            "model": header.model.name(),
            "updates": updates.len(),
            "value": value,
        })
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_prove(args: ProveArgs) -> anyhow::Result<ExitCode> {
    use annostream_transport::frame::{Frame, FrameType};
    use annostream_transport::wire;

    let kind = parse_scheme(&args.scheme)?;
    let (header, updates) = read_stream(Some(&args.input))?;
    let field = FieldContext::for_scheme(kind, header.n, header.b)?;

    let mut frames = vec![Frame::new(
        FrameType::Header,
        wire::encode_header(&field, header.model),
    )];
    for upd in &updates {
        frames.push(Frame::new(
            FrameType::Update,
            wire::encode_update(header.model, upd),
        ));
    }
    frames.push(Frame::new(FrameType::End, vec![]));

    match kind {
        SchemeKind::Triangles => {
            let proof = triangles::prove(&field, &header, &updates)?;
            frames.push(Frame::new(FrameType::ProofSection, wire::encode_poly(&proof.s)));
        }
        SchemeKind::Matching => {
            let proof = matching::prove_matching(&field, &header, &updates)?;
            for payload in wire::encode_matching_proof(&proof) {
                frames.push(Frame::new(FrameType::ProofSection, payload));
            }
        }
        SchemeKind::FourCycles => {
            let mut rng = ChaCha20Rng::seed_from_u64(args.challenge_seed);
            let r1 = field.sample(&mut rng);
            let s1 = fourcycles::prove_round1(&field, &header, &updates)?;
            let s2 = fourcycles::prove_round2(&field, &header, &updates, r1)?;
            frames.push(Frame::new(FrameType::ProofSection, wire::encode_poly(&s1)));
            frames.push(Frame::new(FrameType::Challenge, wire::encode_element(r1)));
            frames.push(Frame::new(FrameType::ProofSection, wire::encode_poly(&s2)));
        }
    }
    transcript::write_transcript(&args.out, &frames)?;
    let hcost_bits: u64 = frames
        .iter()
        .filter(|f| f.ftype == FrameType::ProofSection)
        .map(|f| f.payload.len() as u64 * 8)
        .sum();
    println!(
        "{}",
        json!({
            "report_v": 1,
            "command": "prove",
            "scheme": args.scheme,
            "n": header.n,
            "b": header.b,
            "p": field.modulus(),
            "updates": updates.len(),
            "hcost_bits": hcost_bits,
            "out": args.out.display().to_string(),
        })
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(args: VerifyArgs) -> anyhow::Result<ExitCode> {
    use annostream_transport::frame::FrameType;
    use annostream_transport::wire;

    let frames = transcript::read_transcript(&args.input)?;
    let header_frame = frames
        .iter()
        .find(|f| f.ftype == FrameType::Header)
        .ok_or_else(|| TransportError::MalformedTranscript("no HEADER frame".into()))?;
    let (field, _) = wire::decode_header(&header_frame.payload)?;
    let verdict = transcript::replay(&frames, args.seed)?;
    let (accepted, value) = match verdict {
        Verdict::Accept(v) => (true, Some(v)),
        Verdict::Reject => (false, None),
    };
    println!(
        "{}",
        json!({
            "report_v": 1,
            "command": "verify",
            "in": args.input.display().to_string(),
            "scheme": field.kind().name(),
            "n": field.n(),
            "b": field.multiplicity_bound(),
            "p": field.modulus(),
            "verifier_seed": args.seed,
            "accepted": accepted,
            "value": value,
        })
    );
    Ok(if accepted {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    })
}

fn cmd_serve(args: ServeArgs) -> anyhow::Result<ExitCode> {
    let attack = match args.attack.as_deref() {
        None => AttackMode::Honest,
        Some("one-point") => AttackMode::CorruptPoint {
            section: args.attack_section,
            point: args.attack_point,
        },
        Some(other) => {
            return Err(anyhow!(annostream_core::Error::InvalidParameter(format!(
                "unknown service attack '{other}'"
            ))))
        }
    };
    if args.stdio {
        service::serve_stdio(attack)?;
        return Ok(ExitCode::SUCCESS);
    }
    let port = args.port.unwrap_or_else(annostream_transport::port_from_env);
    let listener = TcpListener::bind(("127.0.0.1", port))?;
    eprintln!("annostream prover listening on 127.0.0.1:{port}");
    service::serve_listener(listener, attack)?;
    Ok(ExitCode::SUCCESS)
}

fn run_against_subprocess(
    kind: SchemeKind,
    header: &StreamHeader,
    updates: &[StreamUpdate],
    seed: u64,
) -> anyhow::Result<SessionOutcome> {
    let exe = std::env::current_exe()?;
    let mut child = std::process::Command::new(exe)
        .args(["serve", "--stdio"])
        .stdin(std::process::Stdio::piped())
        .stdout(std::process::Stdio::piped())
        .stderr(std::process::Stdio::null())
        .spawn()
        .context("spawning prover subprocess")?;
    let mut io = DuplexIo {
        reader: child.stdout.take().expect("piped stdout"),
        writer: child.stdin.take().expect("piped stdin"),
    };
    let outcome = verify_session(
        &mut io,
        kind,
        header.n,
        header.b,
        header.model,
        updates.iter().copied(),
        seed,
    );
    drop(io);
    let _ = child.wait();
    Ok(outcome?)
}

fn cmd_run(args: RunArgs) -> anyhow::Result<ExitCode> {
    let kind = parse_scheme(&args.scheme)?;
    let spec = GenSpec {
        n: args.n,
        m: args.m,
        b: args.b,
        model: UpdateModel::StrictTurnstile,
        deletion_fraction: args.deletion_fraction,
        seed: args.seed,
    };
    let (header, updates) = generate(&spec)?;
    let verifier_seed = args.verifier_seed.unwrap_or(args.seed.wrapping_mul(0x9e37_79b9).wrapping_add(1));
    let field = FieldContext::for_scheme(kind, args.n, args.b)?;

    let outcome = match &args.endpoint {
        Some(addr) => verify_tcp(
            addr,
            kind,
            header.n,
            header.b,
            header.model,
            updates.iter().copied(),
            verifier_seed,
        )?,
        None => run_against_subprocess(kind, &header, &updates, verifier_seed)?,
    };
    if let Some(path) = &args.transcript {
        transcript::write_transcript(path, &outcome.transcript_frames())?;
    }
    let (accepted, value) = match outcome.verdict {
        Verdict::Accept(v) => (true, Some(v)),
        Verdict::Reject => (false, None),
    };
    println!(
        "{}",
        json!({
            "report_v": 1,
            "command": "run",
            "scheme": args.scheme,
            "n": args.n,
            "b": args.b,
            "m": args.m,
            "p": field.modulus(),
            "stream_seed": args.seed,
            "verifier_seed": verifier_seed,
            "accepted": accepted,
            "value": value,
            "cost": {
                "hcost_bits": outcome.cost.hcost_bits,
                "vcost_field_elements": outcome.cost.vcost_field_elements,
                "per_update_muls": outcome.cost.per_update_muls,
                "err_estimate": outcome.cost.err_estimate,
            },
        })
    );
    Ok(if accepted {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    })
}

fn cmd_attack(args: AttackArgs) -> anyhow::Result<ExitCode> {
    let kind = parse_scheme(&args.scheme)?;
    let spec = GenSpec {
        n: args.n,
        m: args.m,
        b: args.b,
        model: UpdateModel::StrictTurnstile,
        deletion_fraction: args.deletion_fraction,
        seed: args.seed,
    };
    let field = FieldContext::for_scheme(kind, args.n, args.b)?;
    let p = field.modulus();
    let n = args.n as f64;

    let (rejections, theoretical_accept_bound, stream_seed) = match (kind, args.corrupt.as_str()) {
        (SchemeKind::Triangles, "one-point") => {
            let (header, updates) = generate(&spec)?;
            let bad = triangles::prove_corrupted(&field, &header, &updates, args.point, 1)?;
            let mut rejections = 0u64;
            for t in 0..args.trials {
                let mut rng = ChaCha20Rng::seed_from_u64(args.seed ^ (0xA5A5_0000 + t));
                let mut sketch = triangles::TriangleSketch::new(&field, field.sample(&mut rng))?;
                sketch.consume(&updates)?;
                if sketch.verify(&bad)? == Verdict::Reject {
                    rejections += 1;
                }
            }
            (rejections, 2.0 * n / p as f64, args.seed)
        }
        (SchemeKind::FourCycles, "one-point") => {
            let (header, updates) = generate(&spec)?;
            let s1 = fourcycles::prove_round1(&field, &header, &updates)?;
            let mut rejections = 0u64;
            for t in 0..args.trials {
                let mut rng = ChaCha20Rng::seed_from_u64(args.seed ^ (0xB6B6_0000 + t));
                let r1 = field.sample(&mut rng);
                let r2 = field.sample(&mut rng);
                let mut sketch = fourcycles::FourCycleSketch::new(&field, r1, r2)?;
                sketch.consume(&updates)?;
                let mut session = fourcycles::FourCycleSession::new(sketch);
                let s1_msg = corrupt_if(&field, &s1, args.section == 0, args.point);
                let challenge = session.receive_s1(s1_msg)?;
                let s2 = fourcycles::prove_round2(&field, &header, &updates, challenge)?;
                let s2_msg = corrupt_if(&field, &s2, args.section == 1, args.point);
                if session.receive_s2(s2_msg)?.0 == Verdict::Reject {
                    rejections += 1;
                }
            }
            (rejections, 4.0 * n / p as f64, args.seed)
        }
        (SchemeKind::Matching, family) => {
            // Scan stream seeds for an instance the attack family applies to.
            let mut found = None;
            for offset in 0..200u64 {
                let mut probe = spec;
                probe.seed = args.seed + offset;
                let (header, updates) = generate(&probe)?;
                let forged = match family {
                    "phantom-edge" => matching::attack_phantom_edge(&field, &header, &updates)?,
                    "forged-ustar" => {
                        matching::attack_inflated_k_forged_ustar(&field, &header, &updates)?
                    }
                    "merged-labels" => matching::attack_merged_labels(&field, &header, &updates)?,
                    "split-labels" => matching::attack_split_labels(&field, &header, &updates)?,
                    other => {
                        return Err(anyhow!(annostream_core::Error::InvalidParameter(format!(
                            "unknown matching attack family '{other}'"
                        ))))
                    }
                };
                if let Some(forged) = forged {
                    found = Some((probe.seed, updates, forged));
                    break;
                }
            }
            let (stream_seed, updates, forged) = found.ok_or_else(|| {
                anyhow!(annostream_core::Error::InvalidParameter(format!(
                    "no instance admitting the {family} attack near seed {}",
                    args.seed
                )))
            })?;
            let mut rejections = 0u64;
            for t in 0..args.trials {
                let mut rng = ChaCha20Rng::seed_from_u64(stream_seed ^ (0xC7C7_0000 + t));
                let mut sketch = matching::MatchingSketch::new(&field, field.sample(&mut rng))?;
                sketch.consume(&updates)?;
                if matching::verify_matching(&sketch, &forged)? == Verdict::Reject {
                    rejections += 1;
                }
            }
            (rejections, 2.0 * n / p as f64, stream_seed)
        }
        (k, c) => {
            return Err(anyhow!(annostream_core::Error::InvalidParameter(format!(
                "corruption '{c}' is not available for scheme '{}'",
                k.name()
            ))))
        }
    };

    let observed = rejections as f64 / args.trials as f64;
    println!(
        "{}",
        json!({
            "report_v": 1,
            "command": "attack",
            "scheme": args.scheme,
            "corrupt": args.corrupt,
            "n": args.n,
            "b": args.b,
            "m": args.m,
            "p": p,
            "seed": args.seed,
            "stream_seed": stream_seed,
            "trials": args.trials,
            "rejections": rejections,
            "observed_rejection_rate": observed,
            "empirical_delta_s": 1.0 - observed,
            "theoretical_accept_bound": theoretical_accept_bound,
        })
    );
    Ok(ExitCode::SUCCESS)
}

fn corrupt_if(
    field: &FieldContext,
    poly: &annostream_core::poly::PointValuePoly,
    yes: bool,
    point: usize,
) -> annostream_core::poly::PointValuePoly {
    if !yes {
        return poly.clone();
    }
    let mut values = poly.values().to_vec();
    let idx = point % values.len();
    values[idx] += field.one();
    annostream_core::poly::PointValuePoly::new(field, values).expect("same shape")
}

fn cmd_reduce(args: ReduceArgs) -> anyhow::Result<ExitCode> {
    let variant = match args.variant.as_str() {
        "disconnectivity" => ReductionVariant::Disconnectivity,
        "bipartiteness" => ReductionVariant::Bipartiteness,
        other => {
            return Err(anyhow!(annostream_core::Error::InvalidParameter(format!(
                "unknown reduction variant '{other}'"
            ))))
        }
    };
    let mut inst = reduction::random_instance(variant, args.n, args.density, args.seed);
    if let Some(i_star) = args.i_star {
        inst = reduction::IndexInstance::new(variant, args.n, inst.bits.clone(), i_star)?;
    }
    let (header, updates) = build_alice_stream(&inst);
    if let Some(path) = &args.out {
        std::fs::write(path, write_text(&header, &updates))?;
    }
    let honest = honest_merlin(&inst);
    let decide = oracle_decide(variant);
    let honest_output = bob_decide(&inst, &honest, &decide)?;

    // Claim sweep: single- and double-bit perturbations over the legal
    // positions (desk-scale n only).
    let mut counterexamples = 0u64;
    let mut lists_checked = 0u64;
    if args.n <= 10 {
        let legal = reduction::legal_positions(&inst, honest.u_star);
        let expect_property = |list: &reduction::MerlinList| -> anyhow::Result<bool> {
            let g3 = reduction::graph_after_list(&inst, list)?;
            Ok(match variant {
                ReductionVariant::Disconnectivity => !oracle_connected(&g3),
                ReductionVariant::Bipartiteness => oracle_bipartite(&g3),
            })
        };
        let mut check = |list: &reduction::MerlinList| -> anyhow::Result<()> {
            lists_checked += 1;
            if expect_property(list)? != (*list == honest) {
                counterexamples += 1;
            }
            Ok(())
        };
        check(&honest)?;
        for (ai, &i) in legal.iter().enumerate() {
            let mut l = honest.clone();
            l.neighbor_bits[i] = !l.neighbor_bits[i];
            check(&l)?;
            for &j in legal.iter().skip(ai + 1) {
                let mut l2 = l.clone();
                l2.neighbor_bits[j] = !l2.neighbor_bits[j];
                check(&l2)?;
            }
        }
    }

    println!(
        "{}",
        json!({
            "report_v": 1,
            "command": "reduce",
            "variant": args.variant,
            "n": args.n,
            "seed": args.seed,
            "index_bits": inst.bits.len(),
            "i_star": inst.i_star,
            "target_bit": inst.target_bit(),
            "merlin_help_bits": honest.neighbor_bits.len(),
            "stream_updates": updates.len(),
            "honest_output": honest_output,
            "claim_lists_checked": lists_checked,
            "claim_counterexamples": counterexamples,
        })
    );
    Ok(if honest_output == inst.target_bit() && counterexamples == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    })
}

fn cmd_report(args: ReportArgs) -> anyhow::Result<ExitCode> {
    let mut sections = Vec::new();
    for (kind, n, m) in [
        (SchemeKind::Triangles, 12u32, 40u64),
        (SchemeKind::Matching, 10, 20),
        (SchemeKind::FourCycles, 8, 20),
    ] {
        let header = StreamHeader::new(n, UpdateModel::StrictTurnstile, 1)?;
        let spec = GenSpec {
            n,
            m,
            b: 1,
            model: UpdateModel::StrictTurnstile,
            deletion_fraction: 0.1,
            seed: args.seed,
        };
        let (_, updates) = generate(&spec)?;
        let outcome = run_against_subprocess(kind, &header, &updates, args.seed)?;
        let field = FieldContext::for_scheme(kind, n, 1)?;
        sections.push(json!({
            "scheme": kind.name(),
            "n": n,
            "b": 1,
            "m": m,
            "p": field.modulus(),
            "seed": args.seed,
            "accepted": outcome.verdict.is_accept(),
            "value": outcome.verdict.value(),
            "cost": {
                "hcost_bits": outcome.cost.hcost_bits,
                "vcost_field_elements": outcome.cost.vcost_field_elements,
                "per_update_muls": outcome.cost.per_update_muls,
            },
        }));
    }
    println!(
        "{}",
        json!({
            "report_v": 1,
            "command": "report",
            "seed": args.seed,
            "schemes": sections,
        })
    );
    Ok(ExitCode::SUCCESS)
}
