//! Command-line front end: every command reads JSON, prints one JSON value
//! on standard output and exits with 0 (pass), 1 (usage or input error) or
//! 2 (verification failure).

use std::ffi::OsString;
use std::io::Read;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use cm3::invariants::{aux_traces, vw};
use cm3::json::{
    decode_pair, decode_rational, decode_reduced, domain_of, encode_invariants, encode_matrix,
    encode_pair, encode_reduced, Pair,
};
use cm3::matrix::{commutator, det, rank_outcome};
use cm3::orbits::{classify_d30_full, normalize_d3_full};
use cm3::relations::{all_residuals, check_cprime_criterion, on_cuspidal_curve};
use cm3::sampler::{
    cm_point, commuting_pair, default_registry, random_cm_point, rank_k_pair,
    run_identity_suite_with, trial_rng, CommutingFamily,
};
use cm3::{
    act_matrices, act_tuple_word, classify_stratum, invariant_tuple, traceless_pair, Complex,
    Domain, Error, Execution, GroupWord, Matrix, NormalizationResult, OrbitLabel, Rational,
    ReducedTuple, Scalar, TolerancePolicy,
};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_FAILURE: i32 = 2;

/// Library operations reached by each command.
pub const COMMAND_TABLE: &[(&str, &[&str])] = &[
    (
        "invariants",
        &[
            "trace_word",
            "commutator",
            "det",
            "traceless_pair",
            "invariant_tuple",
            "vw",
            "aux_traces",
        ],
    ),
    (
        "classify-stratum",
        &[
            "rank",
            "classify_stratum",
            "on_cuspidal_curve",
            "check_cprime_criterion",
        ],
    ),
    (
        "check-relations",
        &[
            "eval_id1z",
            "eval_id2z",
            "eval_r",
            "eval_new_relation",
            "eval_old_relation",
        ],
    ),
    (
        "verify-identities",
        &["run_identity_suite", "consistency_check"],
    ),
    ("sample", &["cm_point", "commuting_pair", "rank_k_pair"]),
    ("act", &["act_matrices", "act_tuple"]),
    ("normalize", &["normalize_d3"]),
    ("classify-commuting", &["classify_d30"]),
];

#[derive(Debug, Parser)]
#[command(
    name = "cm3",
    version,
    about = "Trace invariants, relations and Cremona orbits of 3x3 matrix pairs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Invariant tuple, traceless parts, auxiliary traces and commutator of a pair.
    Invariants(InputArgs),
    /// Stratum of a 3x3 pair by rank([X,Y] + I).
    ClassifyStratum(InputTolArgs),
    /// Relation residuals of a pair or of an invariant tuple.
    CheckRelations(InputTolArgs),
    /// Runs registered identities on random exact witnesses.
    VerifyIdentities(VerifyArgs),
    /// Prints exact witness pairs.
    Sample(SampleArgs),
    /// Applies a group word to a pair or to a reduced tuple.
    Act(ActArgs),
    /// Word carrying a Calogero-Moser tuple to zero.
    Normalize(InputTolArgs),
    /// Orbit of a commuting-variety tuple.
    ClassifyCommuting(InputTolArgs),
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// JSON input file (standard input when omitted or "-").
    #[arg(long)]
    pub input: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TolArgs {
    #[arg(long, default_value_t = 1e-9)]
    pub tol_abs: f64,
    #[arg(long, default_value_t = 1e-9)]
    pub tol_rel: f64,
}

#[derive(Debug, Args)]
pub struct InputTolArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub tol: TolArgs,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Comma-separated identity ids, or "all".
    #[arg(long, value_delimiter = ',', required = true)]
    pub ids: Vec<String>,
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SampleKind {
    Cm,
    Commuting,
    Rank2,
    Rank3,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long, value_enum)]
    pub kind: SampleKind,
    /// Number of witnesses.
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// For `--kind cm`: `{"x": [..], "y_diag": [..]}` giving one exact point.
    #[arg(long)]
    pub input: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ActArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// JSON group word file.
    #[arg(long)]
    pub word: PathBuf,
}

/// Exit code and the text for standard output.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
}

/// An error carrying its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    kind: &'static str,
    message: String,
}

impl Failure {
    fn input(kind: &'static str, message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_INPUT,
            kind,
            message: message.into(),
        }
    }

    fn to_json(&self) -> Value {
        json!({"error": {"kind": self.kind, "message": self.message}})
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::DimensionMismatch { .. } => "dimension_mismatch",
        Error::MixedDomains => "mixed_domains",
        Error::BadShape { .. } => "bad_shape",
        Error::EmptyWord | Error::BadLetter(_) => "trace_word",
        Error::NotTraceless => "not_traceless",
        Error::RepeatedAbscissa(..) => "repeated_abscissa",
        Error::Construction(_) => "construction",
        Error::NotUnimodular => "not_unimodular",
        Error::UnsupportedMove(_) => "unsupported_move",
        Error::NonzeroTranslation => "nonzero_translation",
        Error::Ambiguous { .. } => "ambiguous",
        Error::OffVariety { .. } => "off_variety",
        Error::CaseDispatch { .. } => "case_dispatch",
        Error::UnknownIdentity(_) => "unknown_identity",
        Error::Manifest(_) => "manifest",
        Error::Expression { .. } => "expression",
        Error::Json(_) => "json",
        Error::RelationMismatch(_) => "relation_mismatch",
        Error::Tolerance(_) => "tolerance",
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::CaseDispatch { .. } | Error::RelationMismatch(_) | Error::Construction(_) => {
                EXIT_FAILURE
            }
            _ => EXIT_INPUT,
        };
        Failure {
            code,
            kind: error_kind(&e),
            message: e.to_string(),
        }
    }
}

type Run = std::result::Result<(i32, Value), Failure>;

/// Parses `argv` (program name first) and runs the command.
pub fn dispatch<I, S>(argv: I) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                return Outcome {
                    code: EXIT_PASS,
                    stdout: e.to_string(),
                };
            }
            let f = Failure::input("usage", e.to_string());
            return render(EXIT_INPUT, &f.to_json());
        }
    };
    match run(cli.command) {
        Ok((code, v)) => render(code, &v),
        Err(f) => render(f.code, &f.to_json()),
    }
}

fn render(code: i32, v: &Value) -> Outcome {
    let mut stdout = serde_json::to_string_pretty(v).expect("serializable value");
    stdout.push('\n');
    Outcome { code, stdout }
}

fn run(cmd: Command) -> Run {
    match cmd {
        Command::Invariants(a) => cmd_invariants(&read_json(&a.input)?),
        Command::ClassifyStratum(a) => {
            cmd_stratum(&read_json(&a.input.input)?, &tolerance(&a.tol)?)
        }
        Command::CheckRelations(a) => {
            cmd_relations(&read_json(&a.input.input)?, &tolerance(&a.tol)?)
        }
        Command::VerifyIdentities(a) => cmd_verify(&a),
        Command::Sample(a) => cmd_sample(&a),
        Command::Act(a) => cmd_act(&read_json(&a.input.input)?, &read_file(&a.word)?),
        Command::Normalize(a) => cmd_orbit(&read_json(&a.input.input)?, &tolerance(&a.tol)?, false),
        Command::ClassifyCommuting(a) => {
            cmd_orbit(&read_json(&a.input.input)?, &tolerance(&a.tol)?, true)
        }
    }
}

fn tolerance(t: &TolArgs) -> std::result::Result<TolerancePolicy, Failure> {
    Ok(TolerancePolicy::new(t.tol_abs, t.tol_rel)?)
}

fn parse(text: &str, source: &str) -> std::result::Result<Value, Failure> {
    serde_json::from_str(text).map_err(|e| Failure::input("json", format!("{source}: {e}")))
}

fn read_file(path: &PathBuf) -> std::result::Result<Value, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::input("io", format!("{}: {e}", path.display())))?;
    parse(&text, &path.display().to_string())
}

fn read_json(input: &Option<PathBuf>) -> std::result::Result<Value, Failure> {
    match input {
        Some(p) if p.as_os_str() != "-" => read_file(p),
        _ => {
            let mut text = String::new();
            std::io::stdin()
                .read_to_string(&mut text)
                .map_err(|e| Failure::input("io", format!("stdin: {e}")))?;
            parse(&text, "stdin")
        }
    }
}

fn pair_domain(v: &Value) -> std::result::Result<Domain, Failure> {
    Ok(domain_of(v)?)
}

fn pair_to_complex(p: &Pair<Rational>) -> Pair<Complex> {
    Pair {
        x: p.x.to_complex(),
        y: p.y.to_complex(),
        c: p.c.as_ref().map(|c| cm3::Vector {
            entries: c.entries.iter().map(Scalar::to_complex).collect(),
            orientation: c.orientation,
        }),
        r: p.r.as_ref().map(|r| cm3::Vector {
            entries: r.entries.iter().map(Scalar::to_complex).collect(),
            orientation: r.orientation,
        }),
    }
}

fn cmd_invariants(input: &Value) -> Run {
    fn go<T: Scalar>(p: &Pair<T>) -> cm3::Result<Value> {
        let inv = invariant_tuple(&p.x, &p.y)?;
        let (a, b) = traceless_pair(&p.x, &p.y)?;
        let aux: Map<String, Value> = aux_traces(&a, &b)?
            .named()
            .into_iter()
            .map(|(name, _, value)| (name.to_string(), value.encode()))
            .collect();
        let c = commutator(&p.x, &p.y)?;
        let shifted = &c + &Matrix::identity(c.n());
        let mut out = encode_invariants(&inv);
        let obj = out.as_object_mut().expect("object");
        obj.insert("traceless".into(), encode_pair(&Pair::new(a, b)));
        obj.insert("aux".into(), Value::Object(aux));
        obj.insert("commutator".into(), encode_matrix(&c));
        obj.insert(
            "det_commutator_plus_identity".into(),
            det(&shifted).encode(),
        );
        Ok(out)
    }
    let v = match pair_domain(input)? {
        Domain::Rational => go(&decode_pair::<Rational>(input)?)?,
        Domain::Complex => go(&decode_pair::<Complex>(input)?)?,
    };
    Ok((EXIT_PASS, v))
}

fn cmd_stratum(input: &Value, tol: &TolerancePolicy) -> Run {
    fn go<T: Scalar>(p: &Pair<T>, tol: &TolerancePolicy) -> cm3::Result<Value> {
        let stratum = classify_stratum(&p.x, &p.y, tol)?;
        let c = commutator(&p.x, &p.y)?;
        let rank = rank_outcome(&(&c + &Matrix::identity(c.n())), tol).rank;
        let (v, w) = vw(&p.x, &p.y)?;
        let cprime = check_cprime_criterion(&p.x, &p.y, tol)?;
        Ok(json!({
            "stratum": stratum,
            "rank": rank,
            "v": v.encode(),
            "w": w.encode(),
            "cuspidal": on_cuspidal_curve(&v, &w, tol),
            "cprime": {
                "rank_is_two": cprime.rank_is_two,
                "one_plus_v_plus_w": cprime.residual.encode(),
            },
        }))
    }
    let v = match pair_domain(input)? {
        Domain::Rational => go(&decode_pair::<Rational>(input)?, tol)?,
        Domain::Complex => go(&decode_pair::<Complex>(input)?, tol)?,
    };
    Ok((EXIT_PASS, v))
}

/// Residuals of a realized pair must make both defining relations vanish;
/// for a bare tuple they are only reported.
fn cmd_relations(input: &Value, tol: &TolerancePolicy) -> Run {
    fn go<T: Scalar>(
        t: &ReducedTuple<T>,
        v: &T,
        w: &T,
        realized: bool,
        tol: &TolerancePolicy,
    ) -> (i32, Value) {
        let scale = t
            .max_magnitude()
            .max(v.magnitude())
            .max(w.magnitude())
            .max(1.0)
            .powi(6);
        let res = all_residuals(t, v, w);
        let zero = |id: &str| {
            res.get(id)
                .map(|x| x.is_zero_within(tol, scale))
                .unwrap_or(false)
        };
        let group = |prefix: &str| {
            res.entries
                .iter()
                .filter(|r| r.id.starts_with(prefix))
                .all(|r| r.value.is_zero_within(tol, scale))
        };
        let old = res.get("rel.old").expect("old relation").clone();
        let new = res.get("rel.new").expect("new relation").clone();
        let agree = (old - new).is_zero_within(tol, scale);
        let vanish = zero("rel.old") && zero("rel.new");
        let residuals: Map<String, Value> = res
            .entries
            .iter()
            .map(|r| (r.id.clone(), r.value.encode()))
            .collect();
        let ok = agree && (vanish || !realized);
        let code = if ok { EXIT_PASS } else { EXIT_FAILURE };
        (
            code,
            json!({
                "residuals": residuals,
                "satisfied": {
                    "id1z": group("id1z."),
                    "id2z": group("id2z."),
                    "r": group("r."),
                    "defining_relation": vanish,
                },
                "old_equals_new": agree,
            }),
        )
    }
    let realized = input.get("x").is_some();
    if realized {
        match pair_domain(input)? {
            Domain::Rational => {
                let p = decode_pair::<Rational>(input)?;
                let inv = invariant_tuple(&p.x, &p.y)?;
                Ok(go(&inv.reduced(), &inv.v, &inv.w, true, tol))
            }
            Domain::Complex => {
                let p = decode_pair::<Complex>(input)?;
                let inv = invariant_tuple(&p.x, &p.y)?;
                Ok(go(&inv.reduced(), &inv.v, &inv.w, true, tol))
            }
        }
    } else {
        let field = |k: &str| {
            input
                .get(k)
                .ok_or_else(|| Failure::input("json", format!("tuple input needs field {k:?}")))
        };
        let (v, w) = (field("v")?, field("w")?);
        let exact = decode_reduced::<Rational>(input)
            .and_then(|t| Ok((t, Rational::decode(v)?, Rational::decode(w)?)));
        match exact {
            Ok((t, v, w)) => Ok(go(&t, &v, &w, false, tol)),
            Err(_) => {
                let t = decode_reduced::<Complex>(input)?;
                Ok(go(
                    &t,
                    &Complex::decode(v)?,
                    &Complex::decode(w)?,
                    false,
                    tol,
                ))
            }
        }
    }
}

fn cmd_verify(a: &VerifyArgs) -> Run {
    if a.trials == 0 {
        return Err(Failure::input("usage", "--trials must be positive"));
    }
    let registry = default_registry();
    let ids: Vec<String> = if a.ids.iter().any(|id| id == "all") {
        registry.ids().into_iter().map(String::from).collect()
    } else {
        a.ids.clone()
    };
    let reports = run_identity_suite_with(registry, &ids, a.trials, a.seed, Execution::default())?;
    let code = if reports.iter().all(|r| r.passed()) {
        EXIT_PASS
    } else {
        EXIT_FAILURE
    };
    let v = serde_json::to_value(&reports).map_err(|e| Failure::input("json", e.to_string()))?;
    Ok((code, v))
}

fn cmd_sample(a: &SampleArgs) -> Run {
    let mut witnesses = Vec::new();
    if let Some(path) = &a.input {
        if a.kind != SampleKind::Cm {
            return Err(Failure::input(
                "usage",
                "--input is only accepted with --kind cm",
            ));
        }
        let spec = read_file(path)?;
        let list = |k: &str| -> std::result::Result<Vec<Rational>, Failure> {
            spec.get(k)
                .and_then(Value::as_array)
                .ok_or_else(|| Failure::input("json", format!("cm point needs an array {k:?}")))?
                .iter()
                .map(|v| decode_rational(v).map_err(Failure::from))
                .collect()
        };
        let q = cm_point(&list("x")?, &list("y_diag")?)?;
        witnesses.push(encode_pair(&q.pair()));
    } else {
        for k in 0..a.n {
            let mut rng = trial_rng(a.seed, k as u64, 3);
            let w = match a.kind {
                SampleKind::Cm => encode_pair(&random_cm_point(3, &mut rng).pair()),
                SampleKind::Commuting => {
                    let family = CommutingFamily::ALL[k % 3];
                    let (x, y) = commuting_pair(family, &mut rng);
                    let mut w = encode_pair(&Pair::new(x, y));
                    w["family"] = serde_json::to_value(family).expect("family");
                    w
                }
                SampleKind::Rank2 | SampleKind::Rank3 => {
                    let rank = if a.kind == SampleKind::Rank2 { 2 } else { 3 };
                    let (x, y) = rank_k_pair(rank, &mut rng)?;
                    encode_pair(&Pair::new(x, y))
                }
            };
            witnesses.push(w);
        }
    }
    let kind = a.kind.to_possible_value().expect("named kind");
    Ok((
        EXIT_PASS,
        json!({"kind": kind.get_name(), "seed": a.seed, "witnesses": witnesses}),
    ))
}

/// Exact arithmetic when the input and the word are both rational,
/// complex otherwise.
fn cmd_act(input: &Value, word: &Value) -> Run {
    let exact_word = GroupWord::<Rational>::from_json(word);
    if input.get("x").is_some() {
        let domain = pair_domain(input)?;
        let out = match (domain, exact_word) {
            (Domain::Rational, Ok(w)) => act_pair(&decode_pair::<Rational>(input)?, &w)?,
            (Domain::Rational, Err(_)) => act_pair(
                &pair_to_complex(&decode_pair::<Rational>(input)?),
                &GroupWord::from_json(word)?,
            )?,
            (Domain::Complex, _) => act_pair(
                &decode_pair::<Complex>(input)?,
                &GroupWord::from_json(word)?,
            )?,
        };
        return Ok((EXIT_PASS, out));
    }
    let v = input
        .get("v")
        .ok_or_else(|| Failure::input("json", "tuple input needs field \"v\""))?;
    let exact =
        exact_word.and_then(|w| Ok((w, decode_reduced::<Rational>(input)?, Rational::decode(v)?)));
    let out = match exact {
        Ok((w, t, v)) => act_reduced(&w, &t, &v)?,
        Err(_) => act_reduced(
            &GroupWord::from_json(word)?,
            &decode_reduced::<Complex>(input)?,
            &Complex::decode(v)?,
        )?,
    };
    Ok((EXIT_PASS, out))
}

fn act_reduced<T: Scalar>(w: &GroupWord<T>, t: &ReducedTuple<T>, v: &T) -> cm3::Result<Value> {
    let image = act_tuple_word(w, t, v)?;
    Ok(json!({"a": encode_reduced(&image), "v": v.encode()}))
}

fn act_pair<T: Scalar>(p: &Pair<T>, word: &GroupWord<T>) -> cm3::Result<Value> {
    let (x, y) = act_matrices(word, &p.x, &p.y)?;
    Ok(encode_pair(&Pair {
        x,
        y,
        c: p.c.clone(),
        r: p.r.clone(),
    }))
}

fn decode_full(v: &Value) -> std::result::Result<[Complex; 9], Failure> {
    let arr = match v {
        Value::Array(a) => a,
        Value::Object(o) => o
            .get("a")
            .and_then(Value::as_array)
            .ok_or_else(|| Failure::input("json", "tuple object needs an array field \"a\""))?,
        _ => return Err(Failure::input("json", format!("expected a tuple, got {v}"))),
    };
    let vals = arr
        .iter()
        .map(Complex::decode)
        .collect::<cm3::Result<Vec<_>>>()?;
    let zero = Complex::new(0.0, 0.0);
    match vals.len() {
        7 => Ok(std::array::from_fn(
            |i| if i < 2 { zero } else { vals[i - 2] },
        )),
        9 => Ok(std::array::from_fn(|i| vals[i])),
        k => Err(Failure::input(
            "json",
            format!("tuple must have 7 or 9 entries, got {k}"),
        )),
    }
}

fn encode_result(input: &Value, label: Option<OrbitLabel>, r: &NormalizationResult) -> Value {
    let mut out = json!({
        "input": input,
        "word": r.word.to_json(),
        "word_length": r.word.len(),
        "terminal": encode_reduced(&r.terminal),
        "residual": r.residual,
        "branch_log": r.branch_log,
    });
    if let Some(l) = label {
        out["label"] = serde_json::to_value(l).expect("label");
    }
    out
}

/// One tuple, or a batch `{"tuples": [..]}` whose items are processed in
/// parallel and reported in input order.
fn cmd_orbit(input: &Value, tol: &TolerancePolicy, commuting: bool) -> Run {
    let one = |item: &Value| -> (i32, Value) {
        let outcome = decode_full(item).and_then(|a| {
            if commuting {
                let (label, r) = classify_d30_full(&a, tol)?;
                Ok(encode_result(item, Some(label), &r))
            } else {
                Ok(encode_result(item, None, &normalize_d3_full(&a, tol)?))
            }
        });
        match outcome {
            Ok(v) => (EXIT_PASS, v),
            Err(f) => {
                let mut v = f.to_json();
                v["input"] = item.clone();
                (f.code, v)
            }
        }
    };
    match input.get("tuples").and_then(Value::as_array) {
        Some(items) => {
            let results = Execution::default().map(items.len(), |i| one(&items[i]));
            let code = results.iter().map(|r| r.0).max().unwrap_or(EXIT_PASS);
            Ok((
                code,
                Value::Array(results.into_iter().map(|r| r.1).collect()),
            ))
        }
        None => Ok(one(input)),
    }
}
