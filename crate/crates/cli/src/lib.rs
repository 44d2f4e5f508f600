//! Command-line front end for the probability core.
//!
//! Every subcommand computes one envelope `{command, inputs, result, mode}`
//! and prints it as an aligned table, a single CSV record, or one JSON
//! object. Values are formatted exactly once, so the same strings appear in
//! all three formats: rationals as `num/den` in lowest terms, floats at the
//! requested decimal precision. Reparsing the JSON output and serializing it
//! again reproduces the bytes.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::{One, Zero};
use serde_json::{json, Value as Json};

use inversio_core::bayes::{hartley_deviation, posterior, posterior_interval_prob};
use inversio_core::bernoulli::{
    bernoulli_bound_detail, bernoulli_bound_n, exact_search_n, odds_from_target,
};
use inversio_core::demoivre::{
    middle_term_ratio, normal_deviation_approx, series_terms, EXACT_EVAL_LIMIT,
};
use inversio_core::runs::{run_prob, RunQuery};
use inversio_core::trichotomy::DIRECT_SEARCH_CAP;
use inversio_core::{
    format_rational, parse_rational, rational_to_f64, run_trichotomy, BetaParams, BinomialModel,
    Error, IntervalQuery, MoralCertaintySpec, NumericMode, ObservedCounts, Prob, Rational,
    SampleSizeMethod, SampleSizeResult, Scenario,
};

const LONG_ABOUT: &str = "\
Calculator for binomial deviation probabilities, Bernoulli's moral-certainty
sample sizes, the normal approximation and its correction series, posterior
intervals, and success runs.

Rational arguments accept a fraction like 3/5 or a decimal like 0.02, and
every rational in the output is printed as num/den in lowest terms. Floats
are printed with --precision digits after the decimal point. JSON output is
a single object {command, inputs, result, mode}; parsing it and serializing
it again reproduces the bytes.";

/// Top-level argument shape: one subcommand plus output controls that are
/// accepted anywhere on the line.
#[derive(Parser, Debug)]
#[command(name = "inversio", version, about, long_about = LONG_ABOUT)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct OutputArgs {
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,

    /// Digits after the decimal point for float rendering
    #[arg(
        long,
        global = true,
        env = "INVERSIO_FLOAT_PRECISION",
        default_value_t = 12,
        value_parser = clap::value_parser!(u32).range(1..=30)
    )]
    pub precision: u32,

    /// Compute in exact rational arithmetic where the operation supports it
    /// (direct-prob, bernoulli-n, bayes-interval, hartley, runs;
    /// stirling-terms prints its terms as rationals). Ignored elsewhere.
    #[arg(long, global = true)]
    pub exact: bool,

    /// Write the output to a file instead of stdout
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Copy, Clone, Debug, PartialEq, Eq)]
pub enum Format {
    Table,
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Probability that the success count lands in a region: a single count
    /// (--k), a count interval (--lo --hi), or the deviation band
    /// |X/n - theta| <= eps (--eps)
    #[command(after_help = "CSV columns: n,theta,k,lo,hi,eps,mode,prob")]
    DirectProb(DirectProbArgs),

    /// Bernoulli's closed-form sample size for moral certainty, with the
    /// intermediate quantities of the bound
    #[command(after_help = "CSV columns: theta,eps,target,odds,mode,n,m1,n1,m2,n2,achieved_prob,method")]
    BernoulliN(BernoulliArgs),

    /// Smallest n whose deviation probability reaches the target, by search
    #[command(after_help = "CSV columns: theta,eps,target,n_max,mode,n,achieved_prob,method,dips_below_in_window")]
    SearchN(SearchArgs),

    /// Normal approximation of a deviation probability against the exact
    /// value
    #[command(after_help = "CSV columns: n,theta,eps,continuity,mode,exact,approx,abs_error,rel_error")]
    Demoivre(DemoivreArgs),

    /// Central binomial mass C(n, n/2)/2^n against its limit 2/sqrt(2 pi n)
    #[command(after_help = "CSV columns: n,mode,exact,approx,abs_error,rel_error")]
    MiddleTerm(MiddleTermArgs),

    /// Terms of the factorial correction series at a fixed n, with
    /// divergence metadata
    #[command(after_help = "CSV columns: k,term (one row per term; the metadata appears only in table and json output)")]
    StirlingTerms(StirlingArgs),

    /// Posterior probability that the rate lies in [l1, l2], for a Beta
    /// prior and observed counts
    #[command(after_help = "CSV columns: p,q,prior_a,prior_b,l1,l2,mode,posterior_a,posterior_b,prob")]
    BayesInterval(BayesArgs),

    /// Posterior probability of an eps-band around the observed ratio
    #[command(after_help = "CSV columns: p,q,prior_a,prior_b,eps,mode,center,band_lo,band_hi,posterior_a,posterior_b,prob")]
    Hartley(HartleyArgs),

    /// Probability of a run of r consecutive successes in n trials
    #[command(after_help = "CSV columns: n,r,theta,mode,prob")]
    Runs(RunsArgs),

    /// One scenario read three ways: known-rate sample size, the estimate
    /// plus band that inverted use of the law actually licenses, and the
    /// posterior band probability
    #[command(after_help = "CSV columns: theta_true,p,q,eps,target,prior_a,prior_b,mode,direct.n,direct.achieved_prob,direct.method,direct.dips_below_in_window,inverse_use.estimate,inverse_use.band_lo,inverse_use.band_hi,bayes.posterior_a,bayes.posterior_b,bayes.band_lo,bayes.band_hi,bayes.band_prob")]
    Trichotomy(TrichotomyArgs),
}

fn parse_rational_arg(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

#[derive(Args, Debug)]
#[command(group = clap::ArgGroup::new("event").required(true).args(["k", "lo", "eps"]))]
pub struct DirectProbArgs {
    /// Number of trials
    #[arg(long)]
    pub n: u64,
    /// Success probability, as a/b or a decimal
    #[arg(long, value_parser = parse_rational_arg)]
    pub theta: Rational,
    /// Single success count
    #[arg(long)]
    pub k: Option<u64>,
    /// Lower end of a count interval
    #[arg(long, requires = "hi")]
    pub lo: Option<u64>,
    /// Upper end of a count interval
    #[arg(long, requires = "lo")]
    pub hi: Option<u64>,
    /// Half-width of the deviation band around theta
    #[arg(long, value_parser = parse_rational_arg)]
    pub eps: Option<Rational>,
}

#[derive(Args, Debug)]
#[command(group = clap::ArgGroup::new("certainty").required(true).args(["odds", "target"]))]
pub struct BernoulliArgs {
    /// True success probability
    #[arg(long, value_parser = parse_rational_arg)]
    pub theta: Rational,
    /// Half-width of the deviation band around theta
    #[arg(long, value_parser = parse_rational_arg)]
    pub eps: Rational,
    /// Odds c of landing in the band, i.e. target probability c/(c+1)
    #[arg(long)]
    pub odds: Option<u64>,
    /// Target probability in (0, 1), rounded to the nearest odds c/(c+1)
    #[arg(long, value_parser = parse_rational_arg)]
    pub target: Option<Rational>,
}

#[derive(Args, Debug)]
pub struct SearchArgs {
    /// True success probability
    #[arg(long, value_parser = parse_rational_arg)]
    pub theta: Rational,
    /// Half-width of the deviation band around theta
    #[arg(long, value_parser = parse_rational_arg)]
    pub eps: Rational,
    /// Target probability in (0, 1)
    #[arg(long, value_parser = parse_rational_arg)]
    pub target: Rational,
    /// Give up beyond this many trials
    #[arg(long, default_value_t = DIRECT_SEARCH_CAP)]
    pub n_max: u64,
}

#[derive(Args, Debug)]
pub struct DemoivreArgs {
    /// Number of trials
    #[arg(long)]
    pub n: u64,
    /// Success probability, with 0 < theta < 1
    #[arg(long, value_parser = parse_rational_arg)]
    pub theta: Rational,
    /// Half-width of the deviation band around theta
    #[arg(long, value_parser = parse_rational_arg)]
    pub eps: Rational,
    /// Integrate to the raw band edges instead of the half-integer-corrected
    /// ones
    #[arg(long)]
    pub raw: bool,
}

#[derive(Args, Debug)]
pub struct MiddleTermArgs {
    /// Even number of trials
    #[arg(long)]
    pub n: u64,
}

#[derive(Args, Debug)]
pub struct StirlingArgs {
    /// Expansion point
    #[arg(long)]
    pub n: u64,
    /// How many terms to print
    #[arg(long, default_value_t = 10)]
    pub k_max: u64,
}

#[derive(Args, Debug)]
pub struct BayesArgs {
    /// Observed successes
    #[arg(long)]
    pub p: u64,
    /// Observed failures
    #[arg(long)]
    pub q: u64,
    /// Interval lower end, in [0, 1]
    #[arg(long, value_parser = parse_rational_arg)]
    pub l1: Rational,
    /// Interval upper end, in [0, 1]
    #[arg(long, value_parser = parse_rational_arg)]
    pub l2: Rational,
    /// Beta prior shape for successes
    #[arg(long, default_value_t = 1.0)]
    pub prior_a: f64,
    /// Beta prior shape for failures
    #[arg(long, default_value_t = 1.0)]
    pub prior_b: f64,
}

#[derive(Args, Debug)]
pub struct HartleyArgs {
    /// Observed successes
    #[arg(long)]
    pub p: u64,
    /// Observed failures
    #[arg(long)]
    pub q: u64,
    /// Half-width of the band around the observed ratio
    #[arg(long, value_parser = parse_rational_arg)]
    pub eps: Rational,
    /// Beta prior shape for successes
    #[arg(long, default_value_t = 1.0)]
    pub prior_a: f64,
    /// Beta prior shape for failures
    #[arg(long, default_value_t = 1.0)]
    pub prior_b: f64,
}

#[derive(Args, Debug)]
pub struct RunsArgs {
    /// Number of trials
    #[arg(long)]
    pub n: u64,
    /// Run length sought
    #[arg(long)]
    pub r: u64,
    /// Success probability
    #[arg(long, value_parser = parse_rational_arg)]
    pub theta: Rational,
    /// Evaluate in floating point; the default is exact
    #[arg(long)]
    pub float: bool,
}

#[derive(Args, Debug)]
pub struct TrichotomyArgs {
    /// Known true rate; omit when only observations exist
    #[arg(long, value_parser = parse_rational_arg)]
    pub theta_true: Option<Rational>,
    /// Observed successes
    #[arg(long, default_value_t = 0)]
    pub p: u64,
    /// Observed failures
    #[arg(long, default_value_t = 0)]
    pub q: u64,
    /// Half-width of the deviation band
    #[arg(long, value_parser = parse_rational_arg)]
    pub eps: Rational,
    /// Target probability for the direct reading
    #[arg(long, value_parser = parse_rational_arg)]
    pub target: Rational,
    /// Beta prior shape for successes
    #[arg(long, default_value_t = 1.0)]
    pub prior_a: f64,
    /// Beta prior shape for failures
    #[arg(long, default_value_t = 1.0)]
    pub prior_b: f64,
}

/// Parse, compute, print. Returns the process exit code: 0 on success, 2 on
/// a usage error, 1 when the computation itself rejects the inputs.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(text) => match &cli.output.out {
            Some(path) => {
                if let Err(e) = std::fs::write(path, &text) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return 1;
                }
                0
            }
            None => {
                print!("{text}");
                0
            }
        },
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

type Rendered = (&'static str, Json, Json, &'static str, CsvShape);

enum CsvShape {
    Flat(&'static [&'static str]),
    /// stirling-terms: one k,term row per series term.
    Terms,
}

/// Run one parsed command and render its envelope in the requested format.
/// The returned string is complete output, trailing newline included.
pub fn execute(cli: &Cli) -> inversio_core::Result<String> {
    let out = &cli.output;
    let (name, inputs, result, mode, shape) = match &cli.command {
        Command::DirectProb(a) => direct_prob(a, out)?,
        Command::BernoulliN(a) => bernoulli_n(a, out)?,
        Command::SearchN(a) => search_n(a, out)?,
        Command::Demoivre(a) => demoivre(a, out)?,
        Command::MiddleTerm(a) => middle_term(a, out)?,
        Command::StirlingTerms(a) => stirling_terms(a, out)?,
        Command::BayesInterval(a) => bayes_interval(a, out)?,
        Command::Hartley(a) => hartley(a, out)?,
        Command::Runs(a) => runs(a, out)?,
        Command::Trichotomy(a) => trichotomy(a, out)?,
    };
    let envelope = json!({
        "command": name,
        "inputs": inputs,
        "result": result,
        "mode": mode,
    });
    Ok(match out.format {
        Format::Json => {
            let mut s = serde_json::to_string(&envelope).expect("envelope serializes");
            s.push('\n');
            s
        }
        Format::Table => render_table(&envelope),
        Format::Csv => render_csv(&envelope, &shape),
    })
}

fn direct_prob(a: &DirectProbArgs, out: &OutputArgs) -> inversio_core::Result<Rendered> {
    let model = BinomialModel::new(a.n, a.theta.clone())?;
    let mode = if out.exact || a.n <= EXACT_EVAL_LIMIT {
        NumericMode::Exact
    } else {
        NumericMode::FLOAT64
    };
    let prob = if let Some(k) = a.k {
        model.pmf(k, mode)?
    } else if let (Some(lo), Some(hi)) = (a.lo, a.hi) {
        model.interval_count_prob(lo, hi, mode)?
    } else {
        let eps = a.eps.as_ref().expect("argument group leaves only --eps");
        model.deviation_prob(eps, mode)?
    };
    let inputs = json!({
        "n": a.n,
        "theta": format_rational(&a.theta),
        "k": opt_u64(a.k),
        "lo": opt_u64(a.lo),
        "hi": opt_u64(a.hi),
        "eps": opt_rat(&a.eps),
    });
    let result = json!({ "prob": fmt_prob(&prob, out.precision) });
    Ok((
        "direct-prob",
        inputs,
        result,
        mode_of(&prob),
        CsvShape::Flat(&["n", "theta", "k", "lo", "hi", "eps", "mode", "prob"]),
    ))
}

fn bernoulli_n(a: &BernoulliArgs, out: &OutputArgs) -> inversio_core::Result<Rendered> {
    let odds = match (a.odds, &a.target) {
        (Some(c), None) => c,
        (None, Some(t)) => odds_from_target(t)?,
        _ => unreachable!("argument group enforces exactly one of --odds/--target"),
    };
    let spec = MoralCertaintySpec::new(&a.theta, &a.eps, odds)?;
    let detail = bernoulli_bound_detail(&spec)?;
    let mut res = bernoulli_bound_n(&spec)?;
    if out.exact && !res.achieved_prob.is_exact() {
        let model = BinomialModel::new(res.n, a.theta.clone())?;
        res.achieved_prob = model.deviation_prob(&a.eps, NumericMode::Exact)?;
    }
    let inputs = json!({
        "theta": format_rational(&a.theta),
        "eps": format_rational(&a.eps),
        "odds": opt_u64(a.odds),
        "target": opt_rat(&a.target),
    });
    let result = json!({
        "n": res.n,
        "m1": detail.m1,
        "n1": detail.n1,
        "m2": detail.m2,
        "n2": detail.n2,
        "odds": odds,
        "achieved_prob": fmt_prob(&res.achieved_prob, out.precision),
        "method": method_str(res.method),
    });
    Ok((
        "bernoulli-n",
        inputs,
        result,
        mode_of(&res.achieved_prob),
        CsvShape::Flat(&[
            "theta", "eps", "target", "odds", "mode", "n", "m1", "n1", "m2", "n2",
            "achieved_prob", "method",
        ]),
    ))
}

fn search_n(a: &SearchArgs, out: &OutputArgs) -> inversio_core::Result<Rendered> {
    let res = exact_search_n(&a.theta, &a.eps, &a.target, a.n_max)?;
    let inputs = json!({
        "theta": format_rational(&a.theta),
        "eps": format_rational(&a.eps),
        "target": format_rational(&a.target),
        "n_max": a.n_max,
    });
    let result = sample_size_json(&res, out.precision);
    Ok((
        "search-n",
        inputs,
        result,
        mode_of(&res.achieved_prob),
        CsvShape::Flat(&[
            "theta", "eps", "target", "n_max", "mode", "n", "achieved_prob", "method",
            "dips_below_in_window",
        ]),
    ))
}

fn demoivre(a: &DemoivreArgs, out: &OutputArgs) -> inversio_core::Result<Rendered> {
    let model = BinomialModel::new(a.n, a.theta.clone())?;
    let cmp = normal_deviation_approx(&model, &a.eps, !a.raw)?;
    let inputs = json!({
        "n": a.n,
        "theta": format_rational(&a.theta),
        "eps": format_rational(&a.eps),
        "continuity": !a.raw,
    });
    Ok((
        "demoivre",
        inputs,
        comparison_json(&cmp, out.precision),
        "float",
        CsvShape::Flat(&[
            "n", "theta", "eps", "continuity", "mode", "exact", "approx", "abs_error",
            "rel_error",
        ]),
    ))
}

fn middle_term(a: &MiddleTermArgs, out: &OutputArgs) -> inversio_core::Result<Rendered> {
    let cmp = middle_term_ratio(a.n)?;
    let inputs = json!({ "n": a.n });
    Ok((
        "middle-term",
        inputs,
        comparison_json(&cmp, out.precision),
        "float",
        CsvShape::Flat(&["n", "mode", "exact", "approx", "abs_error", "rel_error"]),
    ))
}

fn stirling_terms(a: &StirlingArgs, out: &OutputArgs) -> inversio_core::Result<Rendered> {
    let exp = series_terms(a.n, a.k_max)?;
    let mut terms = serde_json::Map::new();
    for (i, t) in exp.terms.iter().enumerate() {
        let rendered = if out.exact {
            format_rational(t)
        } else {
            fmt_float(rational_to_f64(t), out.precision)
        };
        terms.insert((i as u64 + 1).to_string(), Json::String(rendered));
    }
    let inputs = json!({ "n": a.n, "k_max": a.k_max });
    let result = json!({
        "terms": terms,
        "min_abs_index": opt_u64(exp.min_abs_index),
        "diverges_after": opt_u64(exp.diverges_after),
    });
    let mode = if out.exact { "exact" } else { "float" };
    Ok(("stirling-terms", inputs, result, mode, CsvShape::Terms))
}

fn bayes_interval(a: &BayesArgs, out: &OutputArgs) -> inversio_core::Result<Rendered> {
    let prior = BetaParams::new(a.prior_a, a.prior_b)?;
    let data = ObservedCounts::new(a.p, a.q);
    let query = IntervalQuery::new(a.l1.clone(), a.l2.clone())?;
    let mode = if out.exact {
        NumericMode::Exact
    } else {
        NumericMode::FLOAT64
    };
    let prob = posterior_interval_prob(&prior, &data, &query, mode)?;
    let post = posterior(&prior, &data);
    let inputs = json!({
        "p": a.p,
        "q": a.q,
        "prior_a": fmt_shape(a.prior_a, out.precision),
        "prior_b": fmt_shape(a.prior_b, out.precision),
        "l1": format_rational(&a.l1),
        "l2": format_rational(&a.l2),
    });
    let result = json!({
        "posterior_a": fmt_shape(post.a(), out.precision),
        "posterior_b": fmt_shape(post.b(), out.precision),
        "prob": fmt_prob(&prob, out.precision),
    });
    Ok((
        "bayes-interval",
        inputs,
        result,
        mode_of(&prob),
        CsvShape::Flat(&[
            "p", "q", "prior_a", "prior_b", "l1", "l2", "mode", "posterior_a", "posterior_b",
            "prob",
        ]),
    ))
}

fn hartley(a: &HartleyArgs, out: &OutputArgs) -> inversio_core::Result<Rendered> {
    let prior = BetaParams::new(a.prior_a, a.prior_b)?;
    let data = ObservedCounts::new(a.p, a.q);
    let mode = if out.exact {
        NumericMode::Exact
    } else {
        NumericMode::FLOAT64
    };
    let prob = hartley_deviation(&prior, &data, &a.eps, mode)?;
    let center = data.ratio().expect("deviation succeeded, so p + q > 0");
    let band_lo = (&center - &a.eps).max(Rational::zero());
    let band_hi = (&center + &a.eps).min(Rational::one());
    let post = posterior(&prior, &data);
    let inputs = json!({
        "p": a.p,
        "q": a.q,
        "prior_a": fmt_shape(a.prior_a, out.precision),
        "prior_b": fmt_shape(a.prior_b, out.precision),
        "eps": format_rational(&a.eps),
    });
    let result = json!({
        "center": format_rational(&center),
        "band_lo": format_rational(&band_lo),
        "band_hi": format_rational(&band_hi),
        "posterior_a": fmt_shape(post.a(), out.precision),
        "posterior_b": fmt_shape(post.b(), out.precision),
        "prob": fmt_prob(&prob, out.precision),
    });
    Ok((
        "hartley",
        inputs,
        result,
        mode_of(&prob),
        CsvShape::Flat(&[
            "p", "q", "prior_a", "prior_b", "eps", "mode", "center", "band_lo", "band_hi",
            "posterior_a", "posterior_b", "prob",
        ]),
    ))
}

fn runs(a: &RunsArgs, out: &OutputArgs) -> inversio_core::Result<Rendered> {
    if a.float && out.exact {
        return Err(Error::Domain("--float conflicts with --exact".into()));
    }
    let query = RunQuery::new(a.n, a.r, a.theta.clone())?;
    let mode = if a.float {
        NumericMode::FLOAT64
    } else {
        NumericMode::Exact
    };
    let prob = run_prob(&query, mode)?;
    let inputs = json!({
        "n": a.n,
        "r": a.r,
        "theta": format_rational(&a.theta),
    });
    let result = json!({ "prob": fmt_prob(&prob, out.precision) });
    Ok((
        "runs",
        inputs,
        result,
        mode_of(&prob),
        CsvShape::Flat(&["n", "r", "theta", "mode", "prob"]),
    ))
}

fn trichotomy(a: &TrichotomyArgs, out: &OutputArgs) -> inversio_core::Result<Rendered> {
    let prior = BetaParams::new(a.prior_a, a.prior_b)?;
    let scenario = Scenario::new(
        a.theta_true.clone(),
        ObservedCounts::new(a.p, a.q),
        a.eps.clone(),
        a.target.clone(),
        prior,
    )?;
    let report = run_trichotomy(&scenario)?;
    let all_exact = report
        .direct
        .as_ref()
        .map_or(true, |d| d.sample_size.achieved_prob.is_exact())
        && report
            .bayes
            .band_prob
            .as_ref()
            .map_or(true, |p| p.is_exact());
    let direct = report
        .direct
        .as_ref()
        .map_or(Json::Null, |d| sample_size_json(&d.sample_size, out.precision));
    let inverse_use = report.inverse_use.as_ref().map_or(Json::Null, |iu| {
        json!({
            "estimate": format_rational(&iu.point_estimate),
            "band_lo": format_rational(&iu.band.lo),
            "band_hi": format_rational(&iu.band.hi),
            "statement": iu.statement,
        })
    });
    let bayes = json!({
        "posterior_a": fmt_shape(report.bayes.posterior.a(), out.precision),
        "posterior_b": fmt_shape(report.bayes.posterior.b(), out.precision),
        "band_lo": report.bayes.band.as_ref().map_or(Json::Null, |b| json!(format_rational(&b.lo))),
        "band_hi": report.bayes.band.as_ref().map_or(Json::Null, |b| json!(format_rational(&b.hi))),
        "band_prob": report.bayes.band_prob.as_ref().map_or(Json::Null, |p| json!(fmt_prob(p, out.precision))),
    });
    let inputs = json!({
        "theta_true": opt_rat(&a.theta_true),
        "p": a.p,
        "q": a.q,
        "eps": format_rational(&a.eps),
        "target": format_rational(&a.target),
        "prior_a": fmt_shape(a.prior_a, out.precision),
        "prior_b": fmt_shape(a.prior_b, out.precision),
    });
    let result = json!({
        "direct": direct,
        "inverse_use": inverse_use,
        "bayes": bayes,
        "notes": report.notes,
    });
    Ok((
        "trichotomy",
        inputs,
        result,
        if all_exact { "exact" } else { "float" },
        CsvShape::Flat(&[
            "theta_true", "p", "q", "eps", "target", "prior_a", "prior_b", "mode",
            "direct.n", "direct.achieved_prob", "direct.method", "direct.dips_below_in_window",
            "inverse_use.estimate", "inverse_use.band_lo", "inverse_use.band_hi",
            "bayes.posterior_a", "bayes.posterior_b", "bayes.band_lo", "bayes.band_hi",
            "bayes.band_prob",
        ]),
    ))
}

fn sample_size_json(r: &SampleSizeResult, precision: u32) -> Json {
    json!({
        "n": r.n,
        "achieved_prob": fmt_prob(&r.achieved_prob, precision),
        "method": method_str(r.method),
        "dips_below_in_window": r.dips_below_in_window.map_or(Json::Null, Json::Bool),
    })
}

fn comparison_json(cmp: &inversio_core::demoivre::ApproxComparison, precision: u32) -> Json {
    json!({
        "exact": fmt_float(cmp.exact, precision),
        "approx": fmt_float(cmp.approx, precision),
        "abs_error": fmt_float(cmp.abs_error, precision),
        "rel_error": fmt_float(cmp.rel_error, precision),
    })
}

fn method_str(m: SampleSizeMethod) -> &'static str {
    match m {
        SampleSizeMethod::BernoulliBound => "bernoulli-bound",
        SampleSizeMethod::ExactSearch => "exact-search",
    }
}

fn mode_of(p: &Prob) -> &'static str {
    if p.is_exact() {
        "exact"
    } else {
        "float"
    }
}

fn opt_u64(v: Option<u64>) -> Json {
    v.map_or(Json::Null, |x| json!(x))
}

fn opt_rat(v: &Option<Rational>) -> Json {
    v.as_ref().map_or(Json::Null, |r| json!(format_rational(r)))
}

fn fmt_prob(p: &Prob, precision: u32) -> String {
    match p {
        Prob::Exact(r) => format_rational(r),
        Prob::Float(v) => fmt_float(*v, precision),
    }
}

/// Fixed-point for magnitudes in [1e-4, 1e16), scientific outside; one rule
/// for every float the tool prints, so formats agree byte for byte.
fn fmt_float(v: f64, precision: u32) -> String {
    let p = precision as usize;
    if !v.is_finite() {
        return v.to_string();
    }
    if v == 0.0 {
        return format!("{:.p$}", 0.0);
    }
    let dec_exp = v.abs().log10().floor();
    if (-4.0..16.0).contains(&dec_exp) {
        format!("{v:.p$}")
    } else {
        format!("{v:.p$e}")
    }
}

/// Beta shapes are almost always integers; print them without a fractional
/// tail when they are.
fn fmt_shape(v: f64, precision: u32) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{v:.0}")
    } else {
        fmt_float(v, precision)
    }
}

fn render_table(envelope: &Json) -> String {
    let mut rows: Vec<(String, String)> = Vec::new();
    collect_rows("", &envelope["inputs"], &mut rows);
    rows.push((
        "mode".to_string(),
        envelope["mode"].as_str().unwrap_or_default().to_string(),
    ));
    collect_rows("", &envelope["result"], &mut rows);
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    let mut s = String::new();
    for (k, v) in rows {
        let _ = writeln!(s, "{k:width$}  {v}");
    }
    s
}

fn collect_rows(prefix: &str, v: &Json, rows: &mut Vec<(String, String)>) {
    match v {
        Json::Object(map) => {
            for (k, val) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                collect_rows(&key, val, rows);
            }
        }
        Json::Array(items) => {
            for (i, val) in items.iter().enumerate() {
                collect_rows(&format!("{prefix}[{i}]"), val, rows);
            }
        }
        Json::Null => rows.push((prefix.to_string(), "-".to_string())),
        Json::String(t) => rows.push((prefix.to_string(), t.clone())),
        other => rows.push((prefix.to_string(), other.to_string())),
    }
}

fn render_csv(envelope: &Json, shape: &CsvShape) -> String {
    match shape {
        CsvShape::Terms => {
            let mut s = String::from("k,term\n");
            if let Some(Json::Object(terms)) = envelope.pointer("/result/terms") {
                for (k, v) in terms {
                    let _ = writeln!(s, "{k},{}", csv_cell(v));
                }
            }
            s
        }
        CsvShape::Flat(cols) => {
            let mut s = cols.join(",");
            s.push('\n');
            let cells: Vec<String> = cols.iter().map(|c| csv_cell(lookup(envelope, c))).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
            s
        }
    }
}

fn csv_cell(v: &Json) -> String {
    match v {
        Json::Null => String::new(),
        Json::String(t) => t.clone(),
        other => other.to_string(),
    }
}

static NULL: Json = Json::Null;

/// Resolve a dotted column path against the envelope: result first, then
/// inputs, then the envelope's own top-level fields (mode).
fn lookup<'a>(envelope: &'a Json, path: &str) -> &'a Json {
    fn walk<'a>(root: &'a Json, path: &str) -> Option<&'a Json> {
        let mut cur = root;
        for part in path.split('.') {
            cur = cur.get(part)?;
        }
        Some(cur)
    }
    walk(&envelope["result"], path)
        .or_else(|| walk(&envelope["inputs"], path))
        .or_else(|| envelope.get(path))
        .unwrap_or(&NULL)
}
