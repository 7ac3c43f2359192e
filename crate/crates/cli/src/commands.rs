use std::f64::consts::PI;
use std::fmt;
use std::io;
use std::path::PathBuf;

use condtele::cv::{
    average_fidelity, boundary_scan, cat_point, coherent_point, default_quadrature, gain_gamma_scan, transfer_point,
    BoundaryScan, GainScan, QuadratureOptions, TeleportConfig,
};
use condtele::ndps::ndps_fidelity_curve;
use condtele::oracle::FockOracle;
use condtele::resources::{
    herald_probability, joint_phase_density, photon_number_distribution, von_neumann_entropy, LogBase,
};
use condtele::{
    ComplexAmplitude, Error, Execution, InputState, Parity, ResourceKind, SchmidtResource, TruncationPolicy,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::args::{Base, Cli, Command, Common, InputKind, NdpsState, StateArgs};
use crate::output::{write_table, Cell, Envelope, Table};
use crate::repro;

pub const NOTE_COHERENT: &str = "coherent Fock coefficients use the normalized form exp(-|a|^2/2) a^n / sqrt(n!)";
pub const NOTE_PHASE: &str = "joint phase density is divided by 2*pi so it integrates to one over [-pi, pi]";
pub const NOTE_NEGATIVE_K: &str =
    "negative number differences lie outside the positive-k protocol and are computed by restricting the sum to existing input levels";
pub const NOTE_CAT: &str =
    "cat-state closed forms use the four-term coherent expansion validated against the Fock oracle (see DEVIATIONS.md)";
pub const NOTE_UNDEFINED: &str = "empty fidelity fields (null in JSON) mark outcomes with zero probability";
pub const NOTE_GAP: &str = "gap_relative is (subtracted - standard) / standard; gap_absolute is the plain difference";

#[derive(Debug)]
pub enum Failure {
    Convergence(String),
    Config(String),
    Io(io::Error),
    Claims { failed: usize, total: usize },
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Io(_) => 1,
            Failure::Convergence(_) => 2,
            Failure::Config(_) => 3,
            Failure::Claims { .. } => 4,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Convergence(m) => write!(f, "numerical failure: {m}"),
            Failure::Config(m) => write!(f, "invalid configuration: {m}"),
            Failure::Io(e) => write!(f, "i/o error: {e}"),
            Failure::Claims { failed, total } => write!(f, "{failed} of {total} claims failed"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Convergence { .. } | Error::NonFinite { .. } => Failure::Convergence(e.to_string()),
            _ => Failure::Config(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

pub type Outcome = Result<Vec<PathBuf>, Failure>;

pub struct Ctx<'a> {
    pub common: &'a Common,
    pub command: &'static str,
    pub policy: TruncationPolicy,
    pub quad: QuadratureOptions,
    pub exec: Execution,
}

impl<'a> Ctx<'a> {
    pub fn new(common: &'a Common, command: &'static str) -> Result<Self, Failure> {
        let policy = TruncationPolicy::new(common.epsilon, common.hard_cap)?;
        let quad = QuadratureOptions {
            order: common.order,
            refine: !common.no_refine,
            width: None,
        };
        Ok(Ctx {
            common,
            command,
            policy,
            quad,
            exec: Execution::default(),
        })
    }

    pub fn resource(&self, kind: ResourceKind, lambda: f64) -> Result<SchmidtResource, Failure> {
        Ok(SchmidtResource::build(kind, lambda, &self.policy)?)
    }

    /// Resolved configuration: the command's own parameters plus the shared
    /// numerical settings actually used.
    pub fn config(&self, params: Value) -> Value {
        json!({
            "command": self.command,
            "params": params,
            "format": self.common.format,
            "truncation": self.policy,
            "quadrature": self.quad,
        })
    }

    pub fn emit(&self, params: Value, notes: &[&str], tables: &[Table]) -> Outcome {
        let env = Envelope {
            command: self.command,
            config: self.config(params),
            notes,
        };
        let mut out = Vec::new();
        for t in tables {
            out.extend(write_table(&self.common.out, self.common.format, &env, t)?);
        }
        Ok(out)
    }
}

fn amp_cells(z: ComplexAmplitude) -> [Cell; 2] {
    [Cell::Num(z.re()), Cell::Num(z.im())]
}

pub fn build_state(kind: InputKind, alpha: ComplexAmplitude, parity: Parity) -> Result<InputState, Failure> {
    Ok(match kind {
        InputKind::Coherent => InputState::coherent(alpha),
        InputKind::Cat => InputState::cat(alpha, parity)?,
    })
}

fn states(s: &StateArgs) -> Result<(InputState, InputState, ComplexAmplitude), Failure> {
    let gamma = s.gamma.unwrap_or(s.alpha);
    Ok((
        build_state(s.input, s.alpha, s.parity)?,
        build_state(s.input, gamma, s.parity)?,
        gamma,
    ))
}

fn state_notes(kind: InputKind) -> Vec<&'static str> {
    match kind {
        InputKind::Coherent => vec![NOTE_COHERENT],
        InputKind::Cat => vec![NOTE_COHERENT, NOTE_CAT],
    }
}

pub fn run(cli: &Cli) -> Outcome {
    let ctx = Ctx::new(&cli.common, cli.command.name())?;
    match &cli.command {
        Command::ResourceStats { lambda, theta } => resource_stats(&ctx, *lambda, *theta),
        Command::EntropyCurve { lambdas, base } => entropy_curve(&ctx, &lambdas.0, *base),
        Command::PhaseDensity { lambda, points } => phase_density(&ctx, *lambda, *points),
        Command::CvPoint {
            kind,
            lambda,
            gain,
            beta,
            state,
        } => cv_point(&ctx, *kind, *lambda, *gain, *beta, state),
        Command::CvAvg {
            kind,
            lambda,
            gain,
            state,
        } => cv_avg(&ctx, *kind, *lambda, *gain, state),
        Command::GainScan {
            kind,
            lambda,
            alpha,
            gains,
            gammas,
        } => gain_scan(&ctx, *kind, *lambda, *alpha, &gains.0, &gammas.0),
        Command::BoundaryScan { alpha, lambdas } => boundary(&ctx, *alpha, &lambdas.0),
        Command::NdpsCurve { k, lambdas, state } => ndps_curve(&ctx, *k, &lambdas.0, state),
        Command::OracleCheck { cases, seed, tolerance } => oracle_check(&ctx, *cases, *seed, *tolerance),
        Command::ReproduceAll => repro::reproduce_all(&ctx),
    }
}

fn resource_stats(ctx: &Ctx, lambda: f64, theta: f64) -> Outcome {
    let herald = herald_probability(theta, lambda)?;
    let mut dist = Table::new("resource_stats", &["kind", "lambda", "level", "probability"]);
    let mut ent = Table::new(
        "resource_entropy",
        &["kind", "lambda", "levels", "tail_mass", "entropy_nat", "entropy_bit"],
    );
    for kind in ResourceKind::ALL {
        let r = ctx.resource(kind, lambda)?;
        for (n, p) in photon_number_distribution(&r) {
            dist.push(vec![kind.label().into(), lambda.into(), n.into(), p.into()]);
        }
        ent.push(vec![
            kind.label().into(),
            lambda.into(),
            r.levels().into(),
            r.tail_mass.into(),
            von_neumann_entropy(&r, LogBase::Natural).into(),
            von_neumann_entropy(&r, LogBase::Two).into(),
        ]);
    }
    ent.summary = vec![
        ("herald_theta", theta.into()),
        ("herald_probability", herald.probability.into()),
        ("herald_valid", herald.valid.into()),
    ];
    ctx.emit(json!({ "lambda": lambda, "theta": theta }), &[], &[dist, ent])
}

fn entropy_curve(ctx: &Ctx, lambdas: &[f64], base: Base) -> Outcome {
    let log = match base {
        Base::E => LogBase::Natural,
        Base::Two => LogBase::Two,
    };
    let mut t = Table::new("entropy_curve", &["lambda", "standard", "subtracted", "added"]);
    for &l in lambdas {
        let mut row = vec![l.into()];
        for kind in ResourceKind::ALL {
            row.push(von_neumann_entropy(&ctx.resource(kind, l)?, log).into());
        }
        t.push(row);
    }
    ctx.emit(json!({ "lambdas": lambdas, "base": base }), &[], &[t])
}

fn phase_density(ctx: &Ctx, lambda: f64, points: usize) -> Outcome {
    if points < 2 {
        return Err(Failure::Config("phase-density needs at least 2 points".into()));
    }
    let res: Vec<SchmidtResource> = ResourceKind::ALL
        .iter()
        .map(|&k| ctx.resource(k, lambda))
        .collect::<Result<_, _>>()?;
    let mut t = Table::new("phase_density", &["phi", "standard", "subtracted", "added"]);
    for j in 0..points {
        let phi = -PI + 2.0 * PI * j as f64 / (points - 1) as f64;
        let mut row = vec![phi.into()];
        row.extend(res.iter().map(|r| Cell::Num(joint_phase_density(r, phi))));
        t.push(row);
    }
    ctx.emit(json!({ "lambda": lambda, "points": points }), &[NOTE_PHASE], &[t])
}

fn cv_point(ctx: &Ctx, kind: ResourceKind, lambda: f64, gain: f64, beta: ComplexAmplitude, s: &StateArgs) -> Outcome {
    let (input, comparison, gamma) = states(s)?;
    let cfg = TeleportConfig::new(gain, comparison, ctx.resource(kind, lambda)?)?;
    let p = match input {
        InputState::Coherent { alpha } if kind.has_closed_form() => coherent_point(&cfg, alpha, beta)?,
        InputState::Cat { alpha, parity } if kind.has_closed_form() => cat_point(&cfg, alpha, parity, beta)?,
        _ => transfer_point(&cfg, &input, beta)?,
    };
    let mut t = Table::new(
        "cv_point",
        &[
            "lambda",
            "g",
            "gamma_re",
            "gamma_im",
            "beta_re",
            "beta_im",
            "prob_density",
            "fidelity",
            "evaluation",
        ],
    );
    let [gr, gi] = amp_cells(gamma);
    let [br, bi] = amp_cells(beta);
    t.push(vec![
        lambda.into(),
        gain.into(),
        gr,
        gi,
        br,
        bi,
        p.prob_density.into(),
        p.fidelity.into(),
        format!("{:?}", p.evaluation).to_lowercase().into(),
    ]);
    let mut notes = state_notes(s.input);
    notes.push(NOTE_UNDEFINED);
    ctx.emit(
        json!({ "kind": kind, "lambda": lambda, "gain": gain, "beta": beta, "state": s, "gamma": gamma }),
        &notes,
        &[t],
    )
}

fn cv_avg(ctx: &Ctx, kind: ResourceKind, lambda: f64, gain: f64, s: &StateArgs) -> Outcome {
    let (input, comparison, gamma) = states(s)?;
    let cfg = TeleportConfig::new(gain, comparison, ctx.resource(kind, lambda)?)?;
    let quad = default_quadrature(&input, lambda, &ctx.quad)?;
    let f = average_fidelity(&cfg, &input, &quad)?;
    let mut t = Table::new("cv_avg", &["lambda", "g", "gamma_re", "gamma_im", "fbar", "err"]);
    let [gr, gi] = amp_cells(gamma);
    t.push(vec![lambda.into(), gain.into(), gr, gi, f.fbar.into(), f.err.into()]);
    t.summary = vec![("evaluation", format!("{:?}", f.evaluation).to_lowercase().into())];
    ctx.emit(
        json!({ "kind": kind, "lambda": lambda, "gain": gain, "state": s, "gamma": gamma }),
        &state_notes(s.input),
        &[t],
    )
}

pub fn run_gain_scan(
    ctx: &Ctx,
    kind: ResourceKind,
    lambda: f64,
    alpha: ComplexAmplitude,
    gains: &[f64],
    gammas: &[f64],
) -> Result<GainScan, Failure> {
    let input = InputState::coherent(alpha);
    let gamma_grid: Vec<ComplexAmplitude> = gammas
        .iter()
        .map(|&g| ComplexAmplitude::real(g))
        .collect::<Result<_, _>>()?;
    Ok(gain_gamma_scan(
        &input,
        &ctx.resource(kind, lambda)?,
        gains,
        &gamma_grid,
        &ctx.quad,
        ctx.exec,
    )?)
}

fn gain_scan(
    ctx: &Ctx,
    kind: ResourceKind,
    lambda: f64,
    alpha: ComplexAmplitude,
    gains: &[f64],
    gammas: &[f64],
) -> Outcome {
    let scan = run_gain_scan(ctx, kind, lambda, alpha, gains, gammas)?;
    let mut t = Table::new("gain_scan", &["lambda", "g", "gamma_re", "gamma_im", "fbar", "err"]);
    for r in &scan.rows {
        t.push(vec![
            lambda.into(),
            r.g.into(),
            r.gamma.re.into(),
            r.gamma.im.into(),
            r.fbar.into(),
            r.err.into(),
        ]);
    }
    t.summary = vec![
        ("best_g", scan.best.g.into()),
        ("best_gamma_re", scan.best.gamma.re.into()),
        ("best_gamma_im", scan.best.gamma.im.into()),
        ("best_fbar", scan.best.fbar.into()),
    ];
    ctx.emit(
        json!({ "kind": kind, "lambda": lambda, "alpha": alpha, "gains": gains, "gammas": gammas }),
        &[NOTE_COHERENT],
        &[t],
    )
}

pub fn run_boundary(ctx: &Ctx, alpha: ComplexAmplitude, lambdas: &[f64]) -> Result<BoundaryScan, Failure> {
    Ok(boundary_scan(alpha, lambdas, &ctx.quad, &ctx.policy, ctx.exec)?)
}

fn opt(v: Option<f64>) -> Cell {
    v.into()
}

fn boundary(ctx: &Ctx, alpha: ComplexAmplitude, lambdas: &[f64]) -> Outcome {
    let scan = run_boundary(ctx, alpha, lambdas)?;
    let mut t = Table::new("boundary_scan", &["lambda", "standard", "subtracted", "err"]);
    for r in &scan.rows {
        t.push(vec![
            r.lambda.into(),
            r.standard.into(),
            r.subtracted.into(),
            r.err.into(),
        ]);
    }
    t.summary = vec![
        ("standard_crossing", opt(scan.standard_crossing)),
        ("subtracted_crossing", opt(scan.subtracted_crossing)),
        ("quantum_window_low", opt(scan.quantum_window.map(|w| w.0))),
        ("quantum_window_high", opt(scan.quantum_window.map(|w| w.1))),
        ("gap_argmax_lambda", scan.gap_argmax_lambda.into()),
        ("gap_absolute", scan.gap_absolute.into()),
        ("gap_relative", scan.gap_relative.into()),
        ("monotone", scan.monotone.into()),
    ];
    ctx.emit(
        json!({ "alpha": alpha, "lambdas": lambdas }),
        &[NOTE_COHERENT, NOTE_GAP],
        &[t],
    )
}

pub fn run_ndps(ctx: &Ctx, k: i64, lambdas: &[f64], s: &NdpsState) -> Result<Vec<Vec<Option<f64>>>, Failure> {
    let input = build_state(s.input, s.alpha, s.parity)?;
    ResourceKind::ALL
        .iter()
        .map(|&kind| {
            let curve = ndps_fidelity_curve(kind, &input, k, lambdas, &ctx.policy, ctx.exec)?;
            Ok(curve.into_iter().map(|(_, f)| f).collect())
        })
        .collect()
}

fn ndps_curve(ctx: &Ctx, k: i64, lambdas: &[f64], s: &NdpsState) -> Outcome {
    let curves = run_ndps(ctx, k, lambdas, s)?;
    let mut t = Table::new("ndps_curve", &["lambda", "standard", "subtracted", "added"]);
    for (i, &l) in lambdas.iter().enumerate() {
        t.push(vec![
            l.into(),
            curves[0][i].into(),
            curves[1][i].into(),
            curves[2][i].into(),
        ]);
    }
    let mut notes = state_notes(s.input);
    notes.push(NOTE_UNDEFINED);
    if k < 0 {
        notes.push(NOTE_NEGATIVE_K);
    }
    t.summary = vec![("k", k.into()), ("extended", (k < 0).into())];
    ctx.emit(json!({ "k": k, "lambdas": lambdas, "state": s }), &notes, &[t])
}

pub struct OracleSample {
    pub table: Table,
    pub max_prob_diff: f64,
    pub max_fid_diff: f64,
}

/// Closed forms against the Fock oracle on a seeded sample. The oracle
/// resource is truncated at ε = 1e-24 since the closed forms sum the
/// Schmidt series to infinity.
pub fn run_oracle(cases: usize, seed: u64) -> Result<OracleSample, Failure> {
    let oracle = FockOracle::new();
    let policy = TruncationPolicy::new(1e-24, 256)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lambdas = [0.3, 0.5, 0.8];
    let gains = [0.5, 1.0];
    let kinds = [ResourceKind::Standard, ResourceKind::PhotonSubtracted];
    let shapes = ["coherent", "even-cat", "odd-cat"];
    let mut table = Table::new(
        "oracle_check",
        &[
            "case",
            "kind",
            "input",
            "lambda",
            "g",
            "alpha_re",
            "alpha_im",
            "gamma_re",
            "gamma_im",
            "beta_re",
            "beta_im",
            "prob_closed",
            "prob_oracle",
            "fidelity_closed",
            "fidelity_oracle",
        ],
    );
    let (mut max_p, mut max_f): (f64, f64) = (0.0, 0.0);
    let draw = |rng: &mut ChaCha8Rng| ComplexAmplitude::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
    for i in 0..cases {
        let lambda = lambdas[i % 3];
        let g = gains[(i / 3) % 2];
        let kind = kinds[(i / 6) % 2];
        let shape = (i / 12) % 3;
        let alpha = draw(&mut rng)?;
        let gamma = draw(&mut rng)?;
        let shift = draw(&mut rng)?;
        let beta = ComplexAmplitude::new(alpha.re() + shift.re(), alpha.im() + shift.im())?;
        let res = SchmidtResource::build(kind, lambda, &policy)?;
        let (input, comparison) = match shape {
            0 => (InputState::coherent(alpha), InputState::coherent(gamma)),
            1 => (
                InputState::cat(alpha, Parity::Even)?,
                InputState::cat(gamma, Parity::Even)?,
            ),
            _ => (
                InputState::cat(alpha, Parity::Odd)?,
                InputState::cat(gamma, Parity::Odd)?,
            ),
        };
        let cfg = TeleportConfig::new(g, comparison.clone(), res.clone())?;
        let closed = match shape {
            0 => coherent_point(&cfg, alpha, beta)?,
            1 => cat_point(&cfg, alpha, Parity::Even, beta)?,
            _ => cat_point(&cfg, alpha, Parity::Odd, beta)?,
        };
        let brute = oracle.oracle_point(&res, &input, beta, g, &comparison)?;
        max_p = max_p.max((closed.prob_density - brute.prob_density).abs());
        let num = |p: &condtele::cv::TeleportPoint| p.prob_density * p.fidelity.unwrap_or(0.0);
        max_f = max_f.max((num(&closed) - num(&brute)).abs());
        if brute.prob_density > 1e-6 {
            if let (Some(a), Some(b)) = (closed.fidelity, brute.fidelity) {
                max_f = max_f.max((a - b).abs());
            }
        }
        let [ar, ai] = amp_cells(alpha);
        let [gr, gi] = amp_cells(gamma);
        let [br, bi] = amp_cells(beta);
        table.push(vec![
            i.into(),
            kind.label().into(),
            shapes[shape].into(),
            lambda.into(),
            g.into(),
            ar,
            ai,
            gr,
            gi,
            br,
            bi,
            closed.prob_density.into(),
            brute.prob_density.into(),
            closed.fidelity.into(),
            brute.fidelity.into(),
        ]);
    }
    Ok(OracleSample {
        table,
        max_prob_diff: max_p,
        max_fid_diff: max_f,
    })
}

fn oracle_check(ctx: &Ctx, cases: usize, seed: u64, tolerance: f64) -> Outcome {
    if cases == 0 {
        return Err(Failure::Config("oracle-check needs at least one case".into()));
    }
    let mut s = run_oracle(cases, seed)?;
    let pass = s.max_prob_diff <= tolerance && s.max_fid_diff <= tolerance;
    s.table.summary = vec![
        ("max_prob_diff", s.max_prob_diff.into()),
        ("max_fidelity_diff", s.max_fid_diff.into()),
        ("tolerance", tolerance.into()),
        ("pass", pass.into()),
    ];
    let written = ctx.emit(
        json!({ "cases": cases, "seed": seed, "tolerance": tolerance, "oracle_epsilon": 1e-24 }),
        &[NOTE_COHERENT, NOTE_CAT, NOTE_UNDEFINED],
        &[s.table],
    )?;
    println!(
        "oracle-check: max |dP| {:.3e}, max |dF| {:.3e}, tolerance {tolerance:.1e}: {}",
        s.max_prob_diff,
        s.max_fid_diff,
        if pass { "pass" } else { "FAIL" }
    );
    if pass {
        Ok(written)
    } else {
        Err(Failure::Claims { failed: 1, total: 1 })
    }
}
