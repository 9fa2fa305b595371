//! Command-line front end: capacity analysis, secure-scheme simulation,
//! non-uniform diamond allocation and the subset-entropy self-check.
//!
//! Output is plain `key: value` lines, stable enough to diff: identical
//! arguments reproduce byte-identical reports (all randomness flows from
//! `--seed`, which defaults to 0, never the clock).
//!
//! Exit codes: 0 success, 2 input error, 3 scheme construction failure,
//! 4 secrecy violation, 5 lemma-check failure.

use clap::{Parser, Subcommand};
use one21_core::adversary::verify_all_subsets;
use one21_core::bounds::capacity_report;
use one21_core::coding::{
    auto_field_spec, decode, encode, mgt1_counts, random_messages, scheme_m1, scheme_mgt1,
    CodingScheme,
};
use one21_core::diamond::{diamond_capacity, diamond_schedule, equal_split_rate, plan_schedule};
use one21_core::entropy::{random_pmf, verify_subset_lemma};
use one21_core::field::{Field, FieldSpec};
use one21_core::netmodel::{format_rat, parse_network, parse_rat, Network, Rat, WiretapModel};
use one21_core::paths::{max_edge_disjoint, max_vertex_disjoint};
use one21_core::rng::SplitMix64;
use std::path::PathBuf;

const EXIT_INPUT: i32 = 2;
const EXIT_SCHEME: i32 = 3;
const EXIT_SECRECY: i32 = 4;
const EXIT_LEMMA: i32 = 5;

#[derive(Parser)]
#[command(
    name = "one21",
    version,
    about = "Capacity bounds, secure coding schemes and wiretap verification for 1-2-1 relay networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Path counts and secure/unsecure capacity bounds for a network file.
    Analyze {
        /// Network description file.
        network: PathBuf,
        /// Number of edges the eavesdropper wiretaps.
        #[arg(long, default_value_t = 0)]
        wiretap: usize,
    },
    /// Build the applicable coding scheme, run encode/decode trials and
    /// verify perfect secrecy against every wiretap subset.
    Simulate {
        network: PathBuf,
        #[arg(long, default_value_t = 0)]
        wiretap: usize,
        /// Encode/decode round trips to run.
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Seed for all randomness (keys and trial messages).
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Field override, e.g. 2^8 (default: smallest that fits).
        #[arg(long)]
        field: Option<String>,
        /// Symbols per packet.
        #[arg(long = "packet-len", default_value_t = 64)]
        packet_len: usize,
        /// Write the first trial's schedule to this file.
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Exact secure capacity of a non-uniform diamond (one beam).
    Diamond {
        /// Relay path capacities, e.g. 3,2,2,1 (entries may be p/q).
        #[arg(long, value_delimiter = ',', required = true)]
        caps: Vec<String>,
        #[arg(long, default_value_t = 0)]
        wiretap: usize,
        /// Also synthesize and verify a schedule meeting the capacity.
        #[arg(long)]
        schedule: bool,
        #[arg(long)]
        field: Option<String>,
        #[arg(long = "packet-len", default_value_t = 64)]
        packet_len: usize,
    },
    /// Randomized self-check of the subset-entropy inequality.
    CheckLemma {
        /// Number of binary variables (at most 4).
        #[arg(long)]
        vars: usize,
        /// Conditioning subset size m.
        #[arg(long)]
        subset: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// What a command ran with; printed as leading `key: value` lines so a
/// report is reproducible from its own header.
struct RunManifest {
    command: &'static str,
    entries: Vec<(String, String)>,
}

impl RunManifest {
    fn new(command: &'static str) -> Self {
        RunManifest {
            command,
            entries: Vec::new(),
        }
    }

    fn push(&mut self, key: &str, value: impl std::fmt::Display) {
        self.entries.push((key.to_string(), value.to_string()));
    }

    fn print(&self) {
        println!("command: {}", self.command);
        println!("version: {}", env!("CARGO_PKG_VERSION"));
        for (k, v) in &self.entries {
            println!("{k}: {v}");
        }
    }
}

struct Failure {
    code: i32,
    message: String,
}

fn fail(code: i32, message: impl Into<String>) -> Failure {
    Failure {
        code,
        message: message.into(),
    }
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Analyze { network, wiretap } => cmd_analyze(&network, wiretap),
        Command::Simulate {
            network,
            wiretap,
            trials,
            seed,
            field,
            packet_len,
            dump,
        } => cmd_simulate(
            &network,
            wiretap,
            trials,
            seed,
            field.as_deref(),
            packet_len,
            dump,
        ),
        Command::Diamond {
            caps,
            wiretap,
            schedule,
            field,
            packet_len,
        } => cmd_diamond(&caps, wiretap, schedule, field.as_deref(), packet_len),
        Command::CheckLemma {
            vars,
            subset,
            trials,
            seed,
        } => cmd_check_lemma(vars, subset, trials, seed),
    };
    if let Err(f) = result {
        eprintln!("error: {}", f.message);
        std::process::exit(f.code);
    }
}

fn load_network(path: &PathBuf) -> Result<Network, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| fail(EXIT_INPUT, format!("cannot read {}: {e}", path.display())))?;
    parse_network(&text).map_err(|e| fail(EXIT_INPUT, e.to_string()))
}

fn parse_field_arg(arg: &str) -> Result<FieldSpec, Failure> {
    let m: u32 = arg
        .strip_prefix("2^")
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| fail(EXIT_INPUT, format!("field must look like 2^8, got '{arg}'")))?;
    FieldSpec::standard(m).map_err(|e| fail(EXIT_INPUT, e.to_string()))
}

fn field_name(spec: FieldSpec) -> String {
    format!("2^{}", spec.degree())
}

fn cmd_analyze(path: &PathBuf, wiretap: usize) -> Result<(), Failure> {
    let net = load_network(path)?;
    WiretapModel::new(&net, wiretap).map_err(|e| fail(EXIT_INPUT, e.to_string()))?;
    let report = capacity_report(&net, wiretap).map_err(|e| fail(EXIT_INPUT, e.to_string()))?;
    println!("h_e: {}", report.h_e);
    println!("h_v: {}", report.h_v);
    println!("unsecure: {}", format_rat(&report.unsecure));
    println!("secure_lower: {}", format_rat(&report.secure_lower));
    println!("secure_upper: {}", format_rat(&report.secure_upper));
    println!("exact: {}", if report.exact { "yes" } else { "no" });
    Ok(())
}

fn build_scheme(
    net: &Network,
    wiretap: usize,
    field_arg: Option<&str>,
    packet_len: usize,
) -> Result<(CodingScheme, Field), Failure> {
    let num_coded = if net.beams() == 1 {
        max_edge_disjoint(net).len()
    } else {
        let h_v = max_vertex_disjoint(net).len();
        if h_v == 0 {
            0
        } else {
            mgt1_counts(h_v, net.beams(), wiretap).num_coded
        }
    };
    let spec = match field_arg {
        Some(arg) => parse_field_arg(arg)?,
        None => auto_field_spec(num_coded).map_err(|e| fail(EXIT_SCHEME, e.to_string()))?,
    };
    let field = Field::new(spec);
    let scheme = if net.beams() == 1 {
        scheme_m1(net, wiretap, &field, packet_len)
    } else {
        scheme_mgt1(net, wiretap, &field, packet_len)
    }
    .map_err(|e| fail(EXIT_SCHEME, e.to_string()))?;
    Ok((scheme, field))
}

fn cmd_simulate(
    path: &PathBuf,
    wiretap: usize,
    trials: usize,
    seed: u64,
    field_arg: Option<&str>,
    packet_len: usize,
    dump: Option<PathBuf>,
) -> Result<(), Failure> {
    let net = load_network(path)?;
    WiretapModel::new(&net, wiretap).map_err(|e| fail(EXIT_INPUT, e.to_string()))?;
    let (scheme, _field) = build_scheme(&net, wiretap, field_arg, packet_len)?;

    let mut manifest = RunManifest::new("simulate");
    manifest.push("network_digest", format!("{:#018x}", net.digest()));
    manifest.push("beams", net.beams());
    manifest.push("wiretap", wiretap);
    manifest.push("field", field_name(scheme.field()));
    manifest.push("packet_len", packet_len);
    manifest.push("seed", seed);
    manifest.push("trials", trials);
    manifest.push(
        "scheme",
        match scheme.mode {
            one21_core::coding::SchemeMode::M1 => "m1",
            one21_core::coding::SchemeMode::MGt1 => "mgt1",
            one21_core::coding::SchemeMode::DiamondNonUniform => "diamond",
        },
    );
    manifest.print();
    println!("rate: {}", format_rat(&scheme.rate()));

    let mut rng = SplitMix64::new(seed);
    let mut ok = 0usize;
    let mut first_dump: Option<String> = None;
    for _ in 0..trials {
        let messages = random_messages(&scheme, &mut rng);
        let key_seed = rng.next_u64();
        let (schedule, _keys) =
            encode(&scheme, &messages, key_seed).map_err(|e| fail(EXIT_SCHEME, e.to_string()))?;
        if first_dump.is_none() {
            first_dump = Some(schedule.serialize());
        }
        match decode(&scheme, &schedule) {
            Ok(recovered) if recovered == messages => ok += 1,
            _ => {}
        }
    }
    println!("decode_ok: {ok}/{trials}");
    if let (Some(path), Some(text)) = (&dump, &first_dump) {
        std::fs::write(path, text)
            .map_err(|e| fail(EXIT_INPUT, format!("cannot write {}: {e}", path.display())))?;
    }

    let verdict =
        verify_all_subsets(&scheme, wiretap).map_err(|e| fail(EXIT_INPUT, e.to_string()))?;
    if let Some(witness) = &verdict.witness {
        println!("secrecy: VIOLATED {witness}");
        return Err(fail(
            EXIT_SECRECY,
            format!(
                "subset {witness} learns {} message dimensions",
                verdict.leaked_dimension
            ),
        ));
    }
    println!("secrecy: perfect");
    if ok != trials {
        return Err(fail(
            EXIT_SCHEME,
            format!("{} of {trials} decode trials failed", trials - ok),
        ));
    }
    Ok(())
}

fn cmd_diamond(
    caps_args: &[String],
    wiretap: usize,
    schedule: bool,
    field_arg: Option<&str>,
    packet_len: usize,
) -> Result<(), Failure> {
    let mut caps: Vec<Rat> = Vec::with_capacity(caps_args.len());
    for (i, tok) in caps_args.iter().enumerate() {
        let cap = parse_rat(tok).map_err(|e| fail(EXIT_INPUT, e))?;
        if cap <= Rat::new(0.into(), 1.into()) {
            return Err(fail(
                EXIT_INPUT,
                format!("capacity {} must be positive", i + 1),
            ));
        }
        caps.push(cap);
    }
    if wiretap > caps.len() {
        return Err(fail(
            EXIT_INPUT,
            format!(
                "wiretap budget {wiretap} exceeds the {} relay paths",
                caps.len()
            ),
        ));
    }

    let alloc = diamond_capacity(&caps, wiretap).map_err(|e| fail(EXIT_INPUT, e.to_string()))?;
    let equal = equal_split_rate(&caps, wiretap).map_err(|e| fail(EXIT_INPUT, e.to_string()))?;

    let mut manifest = RunManifest::new("diamond");
    manifest.push("caps", caps_args.join(","));
    manifest.push("wiretap", wiretap);
    manifest.print();
    println!("capacity: {}", format_rat(&alloc.value));
    let fractions: Vec<String> = alloc.fractions.iter().map(format_rat).collect();
    println!("allocation: {}", fractions.join(","));
    println!("equal_split: {}", format_rat(&equal));

    if schedule {
        let plan =
            plan_schedule(&caps, wiretap, &alloc).map_err(|e| fail(EXIT_INPUT, e.to_string()))?;
        let spec = match field_arg {
            Some(arg) => parse_field_arg(arg)?,
            None => {
                auto_field_spec(plan.num_coded).map_err(|e| fail(EXIT_SCHEME, e.to_string()))?
            }
        };
        let field = Field::new(spec);
        let scheme =
            diamond_schedule(&caps, wiretap, &alloc, &field, packet_len).map_err(|e| match e {
                one21_core::diamond::DiamondError::SecrecyFailure { .. } => {
                    fail(EXIT_SECRECY, e.to_string())
                }
                other => fail(EXIT_SCHEME, other.to_string()),
            })?;
        println!("field: {}", field_name(scheme.field()));
        println!("packet_len: {packet_len}");
        println!("period: {}", scheme.period());
        let slot_plan: Vec<String> = plan.slots_per_path.iter().map(|s| s.to_string()).collect();
        println!("slot_plan: {}", slot_plan.join(","));
        println!("coded_packets: {}", scheme.num_coded());
        println!("key_packets: {}", scheme.num_keys());
        println!("message_packets: {}", scheme.num_messages());
        println!("realized_rate: {}", format_rat(&scheme.rate()));
        // diamond_schedule re-verifies internally; reaching here means the
        // all-subsets check passed.
        println!("secrecy: perfect");
    }
    Ok(())
}

fn cmd_check_lemma(vars: usize, subset: usize, trials: usize, seed: u64) -> Result<(), Failure> {
    if vars == 0 || vars > 4 {
        return Err(fail(
            EXIT_INPUT,
            format!("vars must be in 1..=4, got {vars}"),
        ));
    }
    if subset > vars {
        return Err(fail(
            EXIT_INPUT,
            format!("subset size {subset} exceeds {vars} variables"),
        ));
    }
    let mut manifest = RunManifest::new("check-lemma");
    manifest.push("vars", vars);
    manifest.push("subset", subset);
    manifest.push("trials", trials);
    manifest.push("seed", seed);
    manifest.print();

    let alphabet = vec![2usize; vars];
    let mut rng = SplitMix64::new(seed);
    let mut min_margin = f64::INFINITY;
    for _ in 0..trials {
        let pmf = random_pmf(&mut rng, &alphabet);
        match verify_subset_lemma(&pmf, subset) {
            Ok(witness) => min_margin = min_margin.min(witness.margin),
            Err(e) => {
                println!("lemma_holds: no");
                return Err(fail(EXIT_LEMMA, e.to_string()));
            }
        }
    }
    if trials > 0 {
        println!("min_margin: {min_margin}");
    }
    println!("lemma_holds: yes");
    Ok(())
}
