use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ctpair::ctp::{
    applicability, check_all_tuples, check_bilinearity, check_bis, check_duality, check_kernels, check_naturality,
    check_trilinearity, check_well_defined, selmer, Ctp,
};
use ctpair::fixture::{search_fixtures, validate_fixture, ArithmeticFixture, FixtureFile, ModuleSpec, SearchBounds};
use ctpair::lattice::SubgroupPresentation;
use ctpair::report::{Check, Format, Report};
use ctpair::smod::{dual_object, morphisms, pullback, pushout, Ses};
use ctpair::theta::{
    check_doubled, check_q_well_defined, check_zarhin, cochain_lemma_suite, ThetaPresentation, ThetaSetting,
};
use ctpair::Error;

/// Exact verification of Selmer groups, Cassels-Tate pairings and theta-group identities on finite fixtures.
#[derive(Parser)]
#[command(name = "ctpair", version)]
struct Cli {
    /// Report format.
    #[arg(long, value_enum, global = true, default_value_t = OutFormat::Text)]
    format: OutFormat,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for every randomized trial.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Json,
    Csv,
    Text,
}

impl From<OutFormat> for Format {
    fn from(f: OutFormat) -> Self {
        match f {
            OutFormat::Json => Format::Json,
            OutFormat::Csv => Format::Csv,
            OutFormat::Text => Format::Text,
        }
    }
}

#[derive(Args)]
struct FixtureArg {
    /// Fixture file, or a name looked up in $CTPAIR_FIXTURE_DIR.
    #[arg(long)]
    fixture: String,
}

#[derive(Subcommand)]
enum Command {
    /// Reciprocity and local duality for every declared module.
    Validate(FixtureArg),
    /// Selmer and Sha orders for declared modules and sequence terms.
    Selmer {
        #[command(flatten)]
        fixture: FixtureArg,
        /// Only this sequence.
        #[arg(long)]
        sequence: Option<String>,
    },
    /// Pairing matrix of a sequence and its verdicts.
    Ctp {
        #[command(flatten)]
        fixture: FixtureArg,
        /// Sequence label; defaults to the first declared sequence.
        #[arg(long)]
        sequence: Option<String>,
        /// Resampled choice tuples per generator pair.
        #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u32).range(1..))]
        resample: u32,
        /// Also enumerate every valid choice tuple, up to this many per generator pair.
        #[arg(long)]
        exhaustive: Option<u64>,
        /// Naturality along pullbacks and pushouts by endomorphisms of the end terms.
        #[arg(long)]
        naturality: bool,
        /// Additivity under Baer sum with itself and with the split sequence.
        #[arg(long)]
        trilinearity: bool,
    },
    /// Theta-group suite for a declared theta datum.
    Theta {
        #[command(flatten)]
        fixture: FixtureArg,
        /// Theta datum label; defaults to the first declared datum.
        #[arg(long)]
        theta: Option<String>,
        /// Sequence label; defaults to the one the datum names.
        #[arg(long)]
        sequence: Option<String>,
        /// Random trials per randomized check.
        #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u32).range(1..))]
        resample: u32,
    },
    /// Random fixtures that pass the validators.
    Search {
        #[arg(long, default_value_t = 4)]
        max_group_order: usize,
        #[arg(long, default_value_t = 4)]
        max_n: i64,
        #[arg(long, default_value_t = 3)]
        max_places: usize,
        #[arg(long, default_value_t = 200)]
        attempts: usize,
        /// Stop after this many hits.
        #[arg(long, default_value_t = 5)]
        count: usize,
        /// Also require global duality.
        #[arg(long)]
        global_duality: bool,
        /// Directory for the emitted fixture files.
        #[arg(long)]
        dir: Option<PathBuf>,
    },
}

/// Failure modes mapped onto exit codes.
enum Failure {
    Usage(String),
    Engine(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(msg) => Failure::Usage(format!("[PARSE_ERROR] {msg}")),
            e => Failure::Engine(e),
        }
    }
}

type Outcome = Result<Report, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = cli.format.into();
    let result = match cli.command {
        Command::Validate(a) => validate(&a.fixture),
        Command::Selmer { fixture, sequence } => selmer_cmd(&fixture.fixture, sequence.as_deref()),
        Command::Ctp { fixture, sequence, resample, exhaustive, naturality, trilinearity } => ctp_cmd(
            &fixture.fixture,
            sequence.as_deref(),
            CtpFlags { resample: resample as usize, exhaustive, naturality, trilinearity, seed: cli.seed },
        ),
        Command::Theta { fixture, theta, sequence, resample } => {
            theta_cmd(&fixture.fixture, theta.as_deref(), sequence.as_deref(), resample as usize, cli.seed)
        }
        Command::Search { max_group_order, max_n, max_places, attempts, count, global_duality, dir } => search_cmd(
            SearchBounds { max_group_order, max_n, max_places, attempts, require_global_duality: global_duality },
            cli.seed,
            count,
            dir.as_deref(),
        ),
    };
    match result {
        Ok(report) => {
            let text = report.render(format);
            if let Err(e) = emit(&text, cli.out.as_deref()) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            if report.failed() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Engine(e)) => {
            eprintln!("error[{}]: {e}", e.code());
            ExitCode::from(1)
        }
    }
}

fn emit(text: &str, out: Option<&Path>) -> std::io::Result<()> {
    match out {
        Some(p) => std::fs::write(p, text),
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()
        }
    }
}

fn locate(name: &str) -> Result<PathBuf, Failure> {
    let direct = PathBuf::from(name);
    if direct.is_file() {
        return Ok(direct);
    }
    if let Ok(dir) = std::env::var("CTPAIR_FIXTURE_DIR") {
        for candidate in [Path::new(&dir).join(name), Path::new(&dir).join(format!("{name}.json"))] {
            if candidate.is_file() {
                return Ok(candidate);
            }
        }
    }
    Err(Failure::Usage(format!("fixture `{name}` not found")))
}

fn load(name: &str) -> Result<(FixtureFile, ArithmeticFixture, String), Failure> {
    let path = locate(name)?;
    let file = FixtureFile::load(&path)?;
    let fixture = file.build()?;
    let id = file.id.clone().unwrap_or_else(|| path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default());
    Ok((file, fixture, id))
}

fn validate(name: &str) -> Outcome {
    let (file, f, id) = load(name)?;
    let modules = file.modules(&f)?;
    let r = validate_fixture(&f, &modules)?;
    let mut report = Report::new("validate", id);
    report.checks.push(Check::from_verdict("reciprocity: invariants vanish on global classes", r.reciprocity.clone()));
    for m in &r.modules {
        for (v, verdict) in m.local_duality.iter().enumerate() {
            let place = &f.places()[v].label;
            report.checks.push(Check::from_verdict(format!("local duality for {} at {place}", m.module), verdict.clone()));
        }
        report.fact(format!("global duality for {}", m.module), verdict_text(&m.global_duality));
        for (v, verdict) in m.unramified_orthogonality.iter().enumerate() {
            let place = &f.places()[v].label;
            report.fact(format!("unramified subgroups are exact annihilators for {} at {place}", m.module), verdict_text(verdict));
        }
    }
    debug_assert_eq!(report.failed(), !r.core_pass());
    Ok(report)
}

fn verdict_text(v: &ctpair::fixture::Verdict) -> String {
    match (&v.pass, &v.witness) {
        (true, _) => "holds".into(),
        (false, Some(w)) => format!("fails: {w}"),
        (false, None) => "fails".into(),
    }
}

fn selmer_cmd(name: &str, only: Option<&str>) -> Outcome {
    let (file, f, id) = load(name)?;
    let mut report = Report::new("selmer", id);
    if only.is_none() {
        for (label, m) in file.modules(&f)? {
            report.fact(format!("|H1(G, {label})|"), f.global(&m, 1)?.carrier.order().to_string());
            report.fact(format!("|Sha1({label})|"), f.sha(&m, 1)?.order().to_string());
            report.fact(format!("|Sha2({label})|"), f.sha(&m, 2)?.order().to_string());
            let unr = selmer(&f, &ctpair::smod::SModObject::unramified(&f, m.clone())?)?;
            report.fact(format!("|Sel({label}, unramified)|"), unr.order().to_string());
        }
    }
    let seqs = match only {
        Some(label) => vec![file.sequence(&f, label)?],
        None => file.sequences(&f)?,
    };
    for s in &seqs {
        for (term, obj) in [("M1", s.seq.sub()), ("M", s.seq.middle()), ("M2", s.seq.quotient())] {
            report.fact(format!("{}: |Sel {term}|", s.label), selmer(&f, obj)?.order().to_string());
            report.fact(format!("{}: |Sel {term}^dual|", s.label), selmer(&f, &dual_object(&f, obj)?)?.order().to_string());
        }
    }
    Ok(report)
}

struct CtpFlags {
    resample: usize,
    exhaustive: Option<u64>,
    naturality: bool,
    trilinearity: bool,
    seed: u64,
}

/// Endomorphism ladders kept per end term.
const MAX_LADDERS: usize = 8;

fn ctp_cmd(name: &str, sequence: Option<&str>, flags: CtpFlags) -> Outcome {
    let (file, f, id) = load(name)?;
    let label = match sequence {
        Some(s) => s.to_string(),
        None => file.sequences.first().map(|s| s.label().to_string()).ok_or_else(|| Failure::Usage("fixture declares no sequence".into()))?,
    };
    let resolved = file.sequence(&f, &label)?;
    let e = &resolved.seq;
    let ctp = Ctp::new(&f, e)?;
    let mut report = Report::new("ctp", id);
    report.subject = Some(label);
    if !ctp.canonical {
        report.stamp = Some("NON-CANONICAL: reciprocity fails, values depend on the chosen cochains".into());
    }
    report.fact("|Sel M2|", ctp.left.order().to_string());
    report.fact("|Sel M1^dual|", ctp.right.order().to_string());
    if let Some(why) = applicability(&f, e)? {
        report.fact("theorem hypotheses", why);
    }
    let matrix = ctp.matrix()?;
    report.matrices.push(matrix.block("pairing"));
    report.matrices.push(ctp.matrix_bis()?.block("pairing, alternative construction"));

    let mut rng = ChaCha8Rng::seed_from_u64(flags.seed);
    report.checks.push(check_bis(&ctp)?);
    report.checks.push(check_bilinearity(&ctp)?);
    report.checks.push(check_well_defined(&ctp, flags.resample, &mut rng)?);
    if let Some(limit) = flags.exhaustive {
        report.checks.push(check_all_tuples(&ctp, limit)?);
    }
    report.checks.extend(check_kernels(&f, e)?);
    report.checks.push(check_duality(&f, e)?);
    if flags.naturality {
        report.checks.extend(naturality_checks(&f, e)?);
    }
    if flags.trilinearity {
        let split = Ses::split(&f, e.sub(), e.quotient())?;
        for (what, other) in [("itself", e), ("the split sequence", &split)] {
            let mut c = check_trilinearity(&f, e, other)?;
            c.name = format!("{} (with {what})", c.name);
            report.checks.push(c);
        }
    }
    Ok(report)
}

fn naturality_checks(f: &ArithmeticFixture, e: &Ses) -> Result<Vec<Check>, Failure> {
    let mut out = Vec::new();
    for (k, g) in morphisms(f, e.quotient(), e.quotient())?.iter().take(MAX_LADDERS).enumerate() {
        let mut c = check_naturality(f, &pullback(f, e, g)?)?;
        c.name = format!("{} (pullback {k})", c.name);
        out.push(c);
    }
    for (k, h) in morphisms(f, e.sub(), e.sub())?.iter().take(MAX_LADDERS).enumerate() {
        let mut c = check_naturality(f, &pushout(f, e, h)?)?;
        c.name = format!("{} (pushout {k})", c.name);
        out.push(c);
    }
    Ok(out)
}

fn theta_cmd(name: &str, theta: Option<&str>, sequence: Option<&str>, trials: usize, seed: u64) -> Outcome {
    let (file, f, id) = load(name)?;
    let label = match theta {
        Some(t) => t.to_string(),
        None => file.theta.first().map(|t| t.label().to_string()).ok_or_else(|| Failure::Usage("fixture declares no theta datum".into()))?,
    };
    let mut report = Report::new("theta", id);
    report.subject = Some(label.clone());
    let datum = match file.theta_datum(&f, &label) {
        Ok(d) => d,
        Err(Error::Parse(msg)) => return Err(Failure::Usage(format!("[PARSE_ERROR] {msg}"))),
        Err(e) => {
            report.checks.push(Check::fail("theta datum is well formed", format!("[{}] {e}", e.code())));
            return Ok(report);
        }
    };
    let h = &datum.presentation;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    report.checks.push(Check::from_verdict("theta group axioms", h.check_axioms()));
    report.checks.push(Check::from_verdict("f_H is antisymmetric", h.check_dual_antisymmetry()?));
    for sub in subgroups(&f) {
        let mut c = check_zarhin(h, f.cache(), &sub)?;
        c.name = format!("{} (group of order {})", c.name, sub.order());
        report.checks.push(c);
        let mut c = check_q_well_defined(h, f.cache(), &sub, trials, &mut rng)?;
        c.name = format!("{} (group of order {})", c.name, sub.order());
        report.checks.push(c);
    }
    if let Some(ft) = &datum.finite {
        report.checks.push(Check::from_verdict(ctpair::theta::COMMUTATOR_P0, ft.check_commutator_is_p0()));
        report.checks.push(Check::from_verdict(ctpair::theta::GAMMA, ft.check_gamma()));
        report.checks.extend(ft.check_quadratic_form(f.cache(), f.whole())?);
        let whole = SubgroupPresentation::whole(&f.local_sum(ft.m_two_lambda(), 1)?.group);
        report.checks.push(ft.check_level_two(&f, &whole)?);
    }

    let seq_label = sequence.map(str::to_string).or(datum.sequence.clone());
    let Some(seq_label) = seq_label else {
        return Ok(report);
    };
    report.fact("sequence", seq_label.clone());
    let resolved = file.sequence(&f, &seq_label)?;
    if let Some(sc) = &resolved.sum {
        report.checks.extend(check_doubled(&f, h, &sc.a.conditions, &sc.b.conditions)?);
        return Ok(report);
    }
    theta_setting_checks(&mut report, &f, &resolved.seq, h.clone(), trials, &mut rng)?;
    Ok(report)
}

fn theta_setting_checks(
    report: &mut Report,
    f: &ArithmeticFixture,
    seq: &Ses,
    h: ThetaPresentation,
    trials: usize,
    rng: &mut ChaCha8Rng,
) -> Result<(), Failure> {
    let s = ThetaSetting::new(f, seq, h)?;
    let a = s.check_assumptions()?;
    for c in [&a.commutative, &a.isotropic_sub, &a.orthogonal, &a.combined] {
        report.fact(c.name.clone(), if c.passed() { "holds".to_string() } else { format!("fails: {}", c.witness.clone().unwrap_or_default()) });
    }
    report.checks.push(a.consistent.clone());
    report.checks.push(Check::from_verdict("induced f1, f2 are unique", s.check_induced_uniqueness()?));
    if a.commutative.passed() {
        let ps = s.poonen_stoll()?;
        report.fact("Poonen-Stoll class", format!("{:?}", ps.class));
        report.checks.push(s.check_section_independence(trials, rng)?);
    }
    report.checks.extend(s.check_main()?);
    report.checks.extend(cochain_lemma_suite(&s, trials, rng)?);
    Ok(())
}

/// `G` and the distinct decomposition groups.
fn subgroups(f: &ArithmeticFixture) -> Vec<Arc<ctpair::group::Subgroup>> {
    let mut out = vec![f.whole().clone()];
    for p in f.places() {
        if !out.iter().any(|g| **g == *p.decomposition) {
            out.push(p.decomposition.clone());
        }
    }
    out
}

fn search_cmd(bounds: SearchBounds, seed: u64, count: usize, dir: Option<&Path>) -> Outcome {
    let mut report = Report::new("search", format!("seed {seed}"));
    if let Some(d) = dir {
        std::fs::create_dir_all(d).map_err(|e| Failure::Usage(format!("{}: {e}", d.display())))?;
    }
    for hit in search_fixtures(bounds, seed).take(count) {
        let mut file = FixtureFile::from_fixture(&hit.fixture);
        file.modules = hit.modules.iter().map(|(label, m)| ModuleSpec::torsion(label, m.underlying().order() as i64)).collect();
        let id = hit.fixture.id.clone();
        report.fact(id.clone(), format!("{} places, N = {}", hit.fixture.places().len(), hit.fixture.n()));
        report.checks.push(Check::from_verdict(format!("{id}: reciprocity"), hit.report.reciprocity.clone()));
        report.checks.push(if hit.report.local_duality_holds() {
            Check::pass(format!("{id}: local duality"))
        } else {
            Check::fail(format!("{id}: local duality"), "a declared module fails")
        });
        if let Some(d) = dir {
            let path = d.join(format!("{id}.json"));
            std::fs::write(&path, file.to_json() + "\n").map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
        }
    }
    Ok(report)
}
