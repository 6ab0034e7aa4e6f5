//! Reproducible property suite.
//!
//! Every randomized check draws from its own ChaCha8 stream, derived from the
//! master seed and the check's position, so one seed fixes the whole report
//! byte-for-byte. Criteria `AC1`–`AC11` are the acceptance criteria; the
//! `INV-*` checks cover the remaining per-module properties.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use tropimeas::bridge::{delta_grid, gamma_grid, max_abs_diff};
use tropimeas::geometry::{g1_displacement_bound, g2_displacement_bound};
use tropimeas::measure::tent_function;
use tropimeas::sample::{self, GridPoint};
use tropimeas::{
    aggregate_d, combine, dap_demo, delta_to_gamma, discretize_g1, f_set_element, gamma_to_delta, hat_d, hat_d_meta,
    homotopy_h, max_of, measure_to_gamma, nearest_net_retraction, oracle_sup, saturate_g2, separates, tighten, tilde_d,
    CStructureQuery, DeltaPoint, FiniteMetricSpace, GammaPoint, IdempotentMeasure, LipFunction, MetaMeasure,
    Normalization, PointMap, RMax, WitnessDirection,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Counts {
    pub oracle_spaces: usize,
    pub oracle_pairs: usize,
    pub axiom_triples: usize,
    pub isometry_spaces: usize,
    pub monad: usize,
    pub pushforward: usize,
    pub flatten: usize,
    pub ball: usize,
    pub homotopy: usize,
    pub separation: usize,
    pub bridge_points: usize,
    pub dap_samples: usize,
    pub aggregate_pairs: usize,
    pub invariant: usize,
}

impl Default for Counts {
    fn default() -> Self {
        Counts {
            oracle_spaces: 20,
            oracle_pairs: 10,
            axiom_triples: 1000,
            isometry_spaces: 50,
            monad: 500,
            pushforward: 500,
            flatten: 200,
            ball: 1000,
            homotopy: 500,
            separation: 100,
            bridge_points: 10_000,
            dap_samples: 200,
            aggregate_pairs: 200,
            invariant: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Slack on metric inequalities.
    pub metric: f64,
    pub oracle_step: f64,
    /// Allowed gap `hat_d − oracle_sup`.
    pub oracle_slack: f64,
    pub round_trip: f64,
    pub aggregate: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { metric: 1e-12, oracle_step: 0.01, oracle_slack: 0.02, round_trip: 1e-9, aggregate: 1e-9 }
    }
}

pub const DEFAULT_SEED: u64 = 7;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SuiteConfig {
    pub seed: u64,
    pub counts: Counts,
    pub tolerances: Tolerances,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig { seed: DEFAULT_SEED, counts: Counts::default(), tolerances: Tolerances::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub id: String,
    pub title: String,
    pub passed: bool,
    pub instances: usize,
    pub failures: usize,
    /// Largest `lhs − rhs` seen over the inequality checks, if any.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst_excess: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub passed: bool,
    pub criteria: Vec<CheckResult>,
    pub invariants: Vec<CheckResult>,
}

struct Tally {
    instances: usize,
    failures: usize,
    worst: Option<f64>,
    first_failure: Option<String>,
}

impl Tally {
    fn new() -> Self {
        Tally { instances: 0, failures: 0, worst: None, first_failure: None }
    }

    fn check(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        if !ok {
            self.failures += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(describe());
            }
        }
    }

    /// Checks `lhs ≤ rhs + tol` and tracks `lhs − rhs`.
    fn at_most(&mut self, lhs: f64, rhs: f64, tol: f64, describe: impl FnOnce() -> String) {
        let excess = lhs - rhs;
        self.worst = Some(self.worst.map_or(excess, |w| w.max(excess)));
        self.check(excess <= tol, || format!("{} ({lhs} > {rhs} + {tol})", describe()));
    }

    fn instance(&mut self) {
        self.instances += 1;
    }

    fn finish(self, id: &str, title: &str) -> CheckResult {
        CheckResult {
            id: id.to_owned(),
            title: title.to_owned(),
            passed: self.failures == 0 && self.instances > 0,
            instances: self.instances,
            failures: self.failures,
            worst_excess: self.worst,
            first_failure: self.first_failure,
        }
    }
}

type CheckFn = fn(&SuiteConfig, &mut ChaCha8Rng) -> Tally;

/// Acceptance criteria, in report order.
pub const CRITERIA: &[(&str, &str)] = &[
    ("AC1", "oracle sandwich: oracle_sup <= hat_d <= oracle_sup + 0.02 on 2-3 point spaces"),
    ("AC2", "pseudometric axioms of hat_d for n in 1..=5"),
    ("AC3", "Dirac isometry: (1/n) hat_d(delta_x, delta_y) = d(x, y) exactly"),
    ("AC4", "functor and monad laws of pushforward and flatten"),
    ("AC5", "nonexpansion of pushforward and of flatten"),
    ("AC6", "ball max-plus convexity of hat_d"),
    ("AC7", "homotopy Lipschitz bounds and endpoint identities"),
    ("AC8", "separation of distinct measures by some n <= 64"),
    ("AC9", "simplex bridge round trips, centre, vertices and faces"),
    ("AC10", "disjoint approximation demo on a 6-point space"),
    ("AC11", "aggregate metric value and symmetry"),
];

const CRITERION_CHECKS: &[CheckFn] = &[
    ac1_oracle_sandwich,
    ac2_pseudometric_axioms,
    ac3_dirac_isometry,
    ac4_functor_monad,
    ac5_nonexpansion,
    ac6_ball_convexity,
    ac7_homotopy,
    ac8_separation,
    ac9_bridge,
    ac10_dap,
    ac11_aggregate,
];

pub const INVARIANTS: &[(&str, &str)] = &[
    ("INV-rmax", "max-plus semiring laws and the metric rho"),
    ("INV-tighten", "tighten is n-Lipschitz, below its input and idempotent"),
    ("INV-retraction", "nearest-net retraction is a retraction within the covering radius"),
    ("INV-integral", "Maslov integral: constants, weak additivity, max-linearity"),
    ("INV-canonical", "combine, pushforward and flatten emit canonical measures"),
    ("INV-support", "support is minimal, witnessed by tent functions"),
    ("INV-flatten-tents", "flatten of a unit agrees with the measure on the tent basis"),
    ("INV-hausdorff", "zero-weight measures: hat_d = n * Hausdorff distance of supports"),
    ("INV-witness", "reported witness function attains hat_d"),
    ("INV-meta-oracle", "second-level hat_d agrees with the oracle on the induced space"),
    ("INV-fset", "F(A) closure, padding monotonicity, max A in F(A) and domination"),
    ("INV-displacement", "g1 and g2 displacement bounds, cross-checked by the oracle"),
    ("INV-bridge-injective", "distinct measures map to distinct simplex points"),
];

const INVARIANT_CHECKS: &[CheckFn] = &[
    inv_rmax,
    inv_tighten,
    inv_retraction,
    inv_integral,
    inv_canonical,
    inv_support,
    inv_flatten_tents,
    inv_hausdorff,
    inv_witness,
    inv_meta_oracle,
    inv_fset,
    inv_displacement,
    inv_bridge_injective,
];

/// Independent stream per check: stream ids `0..` for criteria, `1000..` for invariants.
fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Runs one acceptance criterion by id (`"AC1"` … `"AC11"`).
pub fn run_criterion(config: &SuiteConfig, id: &str) -> Option<CheckResult> {
    let idx = CRITERIA.iter().position(|(cid, _)| *cid == id)?;
    let (cid, title) = CRITERIA[idx];
    let tally = CRITERION_CHECKS[idx](config, &mut stream(config.seed, idx as u64));
    Some(tally.finish(cid, title))
}

pub fn run_invariant(config: &SuiteConfig, id: &str) -> Option<CheckResult> {
    let idx = INVARIANTS.iter().position(|(iid, _)| *iid == id)?;
    let (iid, title) = INVARIANTS[idx];
    let tally = INVARIANT_CHECKS[idx](config, &mut stream(config.seed, 1000 + idx as u64));
    Some(tally.finish(iid, title))
}

pub fn run_suite(config: &SuiteConfig) -> SuiteReport {
    let criteria: Vec<_> = CRITERIA.iter().map(|(id, _)| run_criterion(config, id).unwrap()).collect();
    let invariants: Vec<_> = INVARIANTS.iter().map(|(id, _)| run_invariant(config, id).unwrap()).collect();
    let passed = criteria.iter().chain(&invariants).all(|c| c.passed);
    SuiteReport { seed: config.seed, passed, criteria, invariants }
}

fn space(rng: &mut ChaCha8Rng, min: usize, max: usize) -> (Arc<FiniteMetricSpace>, Vec<GridPoint>) {
    let k = rng.gen_range(min..=max);
    sample::grid_space(rng, k, 8)
}

fn lambda(rng: &mut ChaCha8Rng) -> RMax {
    if rng.gen_bool(0.1) {
        RMax::Bottom
    } else {
        RMax::Finite(rng.gen_range(sample::WEIGHT_FLOOR..=0.0))
    }
}

fn ac1_oracle_sandwich(config: &SuiteConfig, rng: &mut ChaCha8Rng) -> Tally {
    let tol = &config.tolerances;
    let mut t = Tally::new();
    for _ in 0..config.counts.oracle_spaces {
        // Coordinates up to 4 quarter steps keep the diameter at most 2.
        let k = rng.gen_range(2..=3);
        let (space, _) = sample::grid_space(rng, k, 4);
        for n in 1..=3 {
            for _ in 0..config.counts.oracle_pairs {
                let (mu, nu) = (sample::measure(rng, &space), sample::measure(rng, &space));
                let exact = hat_d(n, &mu, &nu).unwrap().value;
                let oracle = oracle_sup(n, &mu, &nu, tol.oracle_step).unwrap();
                t.instance();
                t.at_most(oracle, exact, tol.metric, || format!("oracle above closed form, n={n} mu={mu:?} nu={nu:?}"));
                t.at_most(exact, oracle, tol.oracle_slack, || format!("closed form above oracle, n={n} mu={mu:?} nu={nu:?}"));
            }
        }
    }
    t
}

fn ac2_pseudometric_axioms(config: &SuiteConfig, rng: &mut ChaCha8Rng) -> Tally {
    let mut t = Tally::new();
    for n in 1..=5 {
        for _ in 0..config.counts.axiom_triples {
            let (space, _) = space(rng, 1, 6);
            let m: Vec<_> = (0..3).map(|_| sample::measure(rng, &space)).collect();
            let d = |x: usize, y: usize| hat_d(n, &m[x], &m[y]).unwrap().value;
            t.instance();
            t.check(d(0, 1) == d(1, 0), || format!("asymmetric at n={n}: {m:?}"));
            t.check(d(0, 0) == 0.0 && d(1, 1) == 0.0, || format!("nonzero self-distance at n={n}: {m:?}"));
            t.check(d(0, 1) >= 0.0, || format!("negative distance at n={n}: {m:?}"));
            t.at_most(d(0, 2), d(0, 1) + d(1, 2), config.tolerances.metric, || format!("triangle at n={n}: {m:?}"));
        }
    }
    t
}

fn ac3_dirac_isometry(config: &SuiteConfig, rng: &mut ChaCha8Rng) -> Tally {
    let mut t = Tally::new();
    for _ in 0..config.counts.isometry_spaces {
        let (space, _) = space(rng, 2, 8);
        for x in 0..space.len() {
            for y in 0..space.len() {
                let (dx, dy) = (IdempotentMeasure::dirac(&space, x).unwrap(), IdempotentMeasure::dirac(&space, y).unwrap());
                for n in 1..=5 {
                    t.instance();
                    let got = tilde_d(n, &dx, &dy).unwrap();
                    t.check(got == space.d(x, y), || format!("n={n}: {got} != d({x},{y}) = {}", space.d(x, y)));
                    let hat = hat_d(n, &dx, &dy).unwrap().value;
                    t.check(hat == f64::from(n) * space.d(x, y), || format!("n={n}: hat_d {hat}"));
                }
            }
        }
    }
    t
}

fn ac4_functor_monad(config: &SuiteConfig, rng: &mut ChaCha8Rng) -> Tally {
    let mut t = Tally::new();
    for _ in 0..config.counts.monad {
        let (space, coords) = space(rng, 1, 6);
        let mu = sample::measure(rng, &space);
        t.instance();
        let id = PointMap::identity(space.clone());
        t.check(mu.pushforward(&id).unwrap() == mu, || format!("I(id) moved {mu:?}"));

        let f = if rng.gen_bool(0.5) { sample::self_map(rng, &space) } else { sample::nonexpanding_map(rng, &space, &coords) };
        let g = sample::self_map(rng, f.target());
        let gf = f.then(&g).unwrap();
        let lhs = mu.pushforward(&gf).unwrap();
        let rhs = mu.pushforward(&f).unwrap().pushforward(&g).unwrap();
        t.check(lhs == rhs, || format!("I(g.f) != I(g).I(f) on {mu:?}"));

        t.check(MetaMeasure::unit(mu.clone()).flatten() == mu, || format!("flatten(unit) != id on {mu:?}"));
        t.check(MetaMeasure::lift_dirac(&mu).flatten() == mu, || format!("flatten(I(delta)) != id on {mu:?}"));
    }
    t
}

fn ac5_nonexpansion(config: &SuiteConfig, rng: &mut ChaCha8Rng) -> Tally {
    let tol = config.tolerances.metric;
    let mut t = Tally::new();
    for _ in 0..config.counts.pushforward {
        let (space, coords) = space(rng, 1, 6);
        let f = sample::nonexpanding_map(rng, &space, &coords);
        let (mu, nu) = (sample::measure(rng, &space), sample::measure(rng, &space));
        let n = rng.gen_range(1..=5);
        t.instance();
        t.check(f.is_nonexpanding(), || "sampled map is not nonexpanding".into());
        let after = hat_d(n, &mu.pushforward(&f).unwrap(), &nu.pushforward(&f).unwrap()).unwrap().value;
        let before = hat_d(n, &mu, &nu).unwrap().value;
        t.at_most(after, before, tol, || format!("pushforward expanded n={n} mu={mu:?} nu={nu:?}"));
    }
    for _ in 0..config.counts.flatten {
        let (space, _) = space(rng, 1, 5);
        let (big_m, big_n) = (sample::meta_measure(rng, &space, 4), sample::meta_measure(rng, &space, 4));
        let n = rng.gen_range(1..=5);
        let nf = f64::from(n);
        t.instance();
        let flat = hat_d(n, &big_m.flatten(), &big_n.flatten()).unwrap().value / nf;
        let meta = hat_d_meta(n, n, &big_m, &big_n).unwrap().value / nf;
        t.at_most(flat, meta, tol, || format!("flatten expanded n={n} M={big_m:?} N={big_n:?}"));
    }
    t
}

fn ac6_ball_convexity(config: &SuiteConfig, rng: &mut ChaCha8Rng) -> Tally {
    let mut t = Tally::new();
    for _ in 0..config.counts.ball {
        let (space, _) = space(rng, 1, 6);
        let (mu, nu, tau) = (sample::measure(rng, &space), sample::measure(rng, &space), sample::measure(rng, &space));
        let l = lambda(rng);
        let n = rng.gen_range(1..=5);
        let mixed = combine(&[(l, &nu), (RMax::UNIT, &tau)]).unwrap();
        t.instance();
        let lhs = hat_d(n, &mu, &mixed).unwrap().value;
        let rhs = hat_d(n, &mu, &nu).unwrap().value.max(hat_d(n, &mu, &tau).unwrap().value);
        t.at_most(lhs, rhs, config.tolerances.metric, || format!("ball not convex: n={n} lambda={l}"));
    }
    t
}

fn ac7_homotopy(config: &SuiteConfig, rng: &mut ChaCha8Rng) -> Tally {
    let tol = config.tolerances.metric;
    let mut t = Tally::new();
    for _ in 0..config.counts.homotopy {
        let (space, _) = space(rng, 1, 6);
        let (mu, mu2, mu0) = (sample::measure(rng, &space), sample::measure(rng, &space), sample::measure(rng, &space));
        let (l1, l2) = (-rng.gen_range(0.0..=4.0), -rng.gen_range(0.0..=4.0));
        let n = rng.gen_range(1..=5);
        let h = |m: &IdempotentMeasure, l: f64| homotopy_h(m, &mu0, RMax::Finite(l)).unwrap();
        t.instance();
        t.at_most(
            hat_d(n, &h(&mu, l1), &h(&mu2, l1)).unwrap().value,
            hat_d(n, &mu, &mu2).unwrap().value,
            tol,
            || format!("H expanded in mu at n={n}"),
        );
        t.at_most(hat_d(n, &h(&mu, l1), &h(&mu, l2)).unwrap().value, (l1 - l2).abs(), tol, || {
            format!("H not 1-Lipschitz in lambda at n={n}, lambdas {l1} {l2}")
        });

        t.check(homotopy_h(&mu, &mu0, RMax::Bottom).unwrap() == mu, || "H(mu, -inf) != mu".into());
        let family: Vec<_> = (0..rng.gen_range(1..=4)).map(|_| sample::measure(rng, &space)).collect();
        let top = max_of(&family).unwrap();
        for member in &family {
            t.check(homotopy_h(member, &top, RMax::UNIT).unwrap() == top, || "H(mu, 0) != max A".into());
        }
    }
    t
}

fn ac8_separation(config: &SuiteConfig, rng: &mut ChaCha8Rng) -> Tally {
    let mut t = Tally::new();
    for _ in 0..config.counts.separation {
        // A singleton carries only one canonical measure.
        let (space, _) = space(rng, 2, 6);
        let (mu, nu) = sample::distinct_pair(rng, &space);
        t.instance();
        let found = separates(&mu, &nu, 64).unwrap();
        t.check(found.is_some(), || format!("not separated by n <= 64: {mu:?} vs {nu:?}"));
        if let Some(n) = found {
            t.check(hat_d(n, &mu, &nu).unwrap().value > 0.0, || "separating n has zero distance".into());
        }
    }
    t
}

/// Smallest per-axis resolution giving at least `target` points of `Γⁿ`.
fn gamma_resolution(n: usize, target: usize) -> usize {
    (2..).find(|m: &usize| n * m.pow(n as u32 - 1) >= target).unwrap()
}

/// Smallest denominator giving at least `target` points of `Δⁿ⁻¹`.
fn delta_resolution(n: usize, target: usize) -> usize {
    let count = |m: usize| (1..n).fold(1u128, |acc, i| acc * (m + i) as u128 / i as u128);
    (1..).find(|&m| count(m) >= target as u128).unwrap()
}

fn ac9_bridge(config: &SuiteConfig, _rng: &mut ChaCha8Rng) -> Tally {
    let tol = config.tolerances.round_trip;
    let mut t = Tally::new();
    for n in 2..=4 {
        for g in gamma_grid(n, gamma_resolution(n, config.counts.bridge_points)) {
            t.instance();
            let p = gamma_to_delta(&g);
            t.check(DeltaPoint::new(p.p.clone()).is_ok(), || format!("{g:?} left the simplex: {p:?}"));
            t.check(p.zero_set() == g.zero_set(), || format!("face changed: {g:?} -> {p:?}"));
            let back = delta_to_gamma(&p);
            t.at_most(max_abs_diff(&back.z, &g.z), 0.0, tol, || format!("round trip {g:?} -> {back:?}"));
        }
        for d in delta_grid(n, delta_resolution(n, config.counts.bridge_points)) {
            t.instance();
            let z = delta_to_gamma(&d);
            t.check(GammaPoint::new(z.z.clone()).is_ok(), || format!("{d:?} left the tropical simplex: {z:?}"));
            t.check(z.zero_set() == d.zero_set(), || format!("face changed: {d:?} -> {z:?}"));
            let back = gamma_to_delta(&z);
            t.at_most(max_abs_diff(&back.p, &d.p), 0.0, tol, || format!("round trip {d:?} -> {back:?}"));
        }

        let centre = vec![1.0 / n as f64; n];
        t.check(gamma_to_delta(&GammaPoint { z: vec![1.0; n] }).p == centre, || "centre not mapped to barycenter".into());
        t.check(delta_to_gamma(&DeltaPoint { p: centre }).z == vec![1.0; n], || "barycenter not mapped to centre".into());
        for i in 0..n {
            let mut vertex = vec![0.0; n];
            vertex[i] = 1.0;
            t.check(gamma_to_delta(&GammaPoint { z: vertex.clone() }).p == vertex, || format!("vertex {i} moved"));
            t.check(delta_to_gamma(&DeltaPoint { p: vertex.clone() }).z == vertex, || format!("vertex {i} moved back"));
        }
    }
    t
}

fn ac10_dap(config: &SuiteConfig, rng: &mut ChaCha8Rng) -> Tally {
    let mut t = Tally::new();
    let (space, _) = sample::grid_space(rng, 6, 8);
    let mut points: Vec<usize> = (0..6).collect();
    let net: Vec<usize> = {
        use rand::seq::SliceRandom;
        points.shuffle(rng);
        let mut net = points[..3].to_vec();
        net.sort_unstable();
        net
    };
    let lambda = -1.0;
    let n = 1;
    let report = dap_demo(&space, &net, lambda, config.counts.dap_samples, n, rng).unwrap();
    t.instance();
    t.check(report.disjoint, || format!("no disjointness certificate: {report:?}"));
    t.check(report.g2_image_support.len() == space.len(), || "a g2 image lacks full support".into());
    let net_labels: Vec<&str> = net.iter().map(|&p| space.label(p)).collect();
    t.check(report.g1_image_support.iter().all(|l| net_labels.contains(&l.as_str())), || "a g1 image leaves the net".into());
    t.at_most(report.max_displacement_g1, report.displacement_bound_g1, 0.0, || "g1 displacement".into());
    t.at_most(report.max_displacement_g2, report.displacement_bound_g2, 0.0, || "g2 displacement".into());
    t
}

fn ac11_aggregate(config: &SuiteConfig, rng: &mut ChaCha8Rng) -> Tally {
    let tol = config.tolerances.aggregate;
    let mut t = Tally::new();
    let two = Arc::new(FiniteMetricSpace::from_rows(&["a", "b"], &[&[0.0, 1.0], &[1.0, 0.0]]).unwrap());
    let (da, db) = (IdempotentMeasure::dirac(&two, 0).unwrap(), IdempotentMeasure::dirac(&two, 1).unwrap());
    t.instance();
    let value = aggregate_d(&da, &db, tol).unwrap();
    t.at_most((value - 1.0).abs(), 0.0, tol, || format!("aggregate of Diracs at distance 1 is {value}"));
    for _ in 0..config.counts.aggregate_pairs {
        let (space, _) = space(rng, 1, 6);
        let (mu, nu) = (sample::measure(rng, &space), sample::measure(rng, &space));
        t.instance();
        let (ab, ba) = (aggregate_d(&mu, &nu, tol).unwrap(), aggregate_d(&nu, &mu, tol).unwrap());
        t.check(ab == ba, || format!("aggregate asymmetric: {ab} vs {ba}"));
    }
    t
}

fn inv_rmax(config: &SuiteConfig, rng: &mut ChaCha8Rng) -> Tally {
    let mut t = Tally::new();
    let draw = |rng: &mut ChaCha8Rng| {
        if rng.gen_bool(0.15) {
            RMax::Bottom
        } else {
            RMax::Finite(f64::from(rng.gen_range(-40i32..=40)) / 4.0)
        }
    };
    for _ in 0..config.counts.invariant * 5 {
        let (a, b, c) = (draw(rng), draw(rng), draw(rng));
        t.instance();
        t.check(a.oplus(b) == b.oplus(a) && a.oplus(b).oplus(c) == a.oplus(b.oplus(c)), || "oplus laws".into());
        t.check(a.oplus(a) == a, || "oplus not idempotent".into());
        t.check(a.odot(b.oplus(c)) == a.odot(b).oplus(a.odot(c)), || "odot does not distribute".into());
        t.check(a.rho(b) == b.rho(a) && a.rho(a) == 0.0, || "rho symmetry/identity".into());
        let scale = 1.0 + a.exp() + b.exp() + c.exp();
        t.at_most(a.rho(c), a.rho(b) + b.rho(c), config.tolerances.metric * scale, || "rho triangle".into());
    }
    t
}

fn inv_tighten(config: &SuiteConfig, rng: &mut ChaCha8Rng) -> Tally {
    let mut t = Tally::new();
    for _ in 0..config.counts.invariant {
        let (space, _) = space(rng, 1, 6);
        let raw = sample::function(rng, &space, 10.0);
        let n = rng.gen_range(1..=5);
        let once = tighten(&raw, n, &space).unwrap();
        t.instance();
        t.check(LipFunction::new(&space, once.values().to_vec(), n).is_ok(), || "tighten output not Lipschitz".into());
        t.check(once.values().iter().zip(&raw).all(|(a, b)| a <= b), || "tighten raised a value".into());
        t.check(tighten(once.values(), n, &space).unwrap() == once, || "tighten not idempotent".into());
        let cone: Vec<f64> = (0..space.len()).map(|z| f64::from(n) * space.d(0, z)).collect();
        t.check(tighten(&cone, n, &space).unwrap().values() == cone.as_slice(), || "tighten moved a Lipschitz cone".into());
    }
    t
}

fn inv_retraction(config: &SuiteConfig, rng: &mut ChaCha8Rng) -> Tally {
    let mut t = Tally::new();
    for _ in 0..config.counts.invariant {
        let (space, _) = space(rng, 1, 7);
        let mut net: Vec<usize> = (0..space.len()).filter(|_| rng.gen_bool(0.4)).collect();
        if net.is_empty() {
            net.push(rng.gen_range(0..space.len()));
        }
        let r = nearest_net_retraction(&space, &net).unwrap();
        let radius = space.covering_radius(&net).unwrap();
        t.instance();
        t.check(r.then(&r).unwrap().assignment() == r.assignment(), || "r.r != r".into());
        t.check(net.iter().all(|&p| r.apply(p) == p), || "net point moved".into());
        t.check((0..space.len()).all(|z| space.d(z, r.apply(z)) <= radius), || "moved beyond covering radius".into());
    }
    t
}

fn inv_integral(config: &SuiteConfig, rng: &mut ChaCha8Rng) -> Tally {
    let mut t = Tally::new();
    for _ in 0..config.counts.invariant {
        let (space, _) = space(rng, 1, 6);
        let mu = sample::dyadic_measure(rng, &space);
        let phi = sample::dyadic_function(rng, &space, 5.0);
        let psi = sample::dyadic_function(rng, &space, 5.0);
        let c = f64::from(rng.gen_range(-40i32..=40)) / 8.0;
        let integral = |f: &[f64]| mu.integrate(f).unwrap();
        t.instance();
        t.check(integral(&vec![c; space.len()]) == c, || "constants not preserved".into());
        let shifted: Vec<f64> = phi.iter().map(|v| c + v).collect();
        t.check(integral(&shifted) == c + integral(&phi), || "not weakly additive".into());
        let joined: Vec<f64> = phi.iter().zip(&psi).map(|(a, b)| a.max(*b)).collect();
        t.check(integral(&joined) == integral(&phi).max(integral(&psi)), || "not max-linear".into());
    }
    t
}

fn is_canonical(mu: &IdempotentMeasure) -> bool {
    let atoms = mu.atoms();
    !atoms.is_empty()
        && atoms.windows(2).all(|w| w[0].0 < w[1].0)
        && atoms.iter().all(|a| a.1.is_finite() && a.1 <= 0.0)
        && atoms.iter().any(|a| a.1 == 0.0)
}

fn inv_canonical(config: &SuiteConfig, rng: &mut ChaCha8Rng) -> Tally {
    let mut t = Tally::new();
    for _ in 0..config.counts.invariant {
        let (space, coords) = space(rng, 1, 6);
        let (mu, nu) = (sample::measure(rng, &space), sample::measure(rng, &space));
        let l = lambda(rng);
        t.instance();
        t.check(is_canonical(&combine(&[(RMax::UNIT, &mu), (l, &nu)]).unwrap()), || "combine".into());
        t.check(is_canonical(&mu.pushforward(&sample::nonexpanding_map(rng, &space, &coords)).unwrap()), || "pushforward".into());
        t.check(is_canonical(&sample::meta_measure(rng, &space, 4).flatten()), || "flatten".into());
    }
    t
}

fn inv_support(config: &SuiteConfig, rng: &mut ChaCha8Rng) -> Tally {
    let mut t = Tally::new();
    for _ in 0..config.counts.invariant {
        let (space, _) = space(rng, 2, 6);
        let mu = sample::measure(rng, &space);
        let gap = mu.max_abs_weight() + 1.0;
        t.instance();
        for &p in &mu.support() {
            let rest: Vec<(usize, RMax)> = mu.atoms().iter().filter(|a| a.0 != p).map(|&(q, w)| (q, RMax::Finite(w))).collect();
            let tent = tent_function(&space, p, gap);
            let full = mu.integrate(&tent).unwrap();
            // Dropping an atom, with or without renormalizing, changes the tent integral.
            for mode in [Normalization::Normalize, Normalization::Strict] {
                if let Ok(smaller) = IdempotentMeasure::canonicalize(&space, &rest, mode) {
                    t.check(smaller.integrate(&tent).unwrap() != full, || format!("atom at {p} is redundant in {mu:?}"));
                }
            }
        }
    }
    t
}

/// Weights recovered from tent integrals alone.
fn tent_profile(mu: &IdempotentMeasure, gap: f64) -> Vec<Option<f64>> {
    (0..mu.space().len())
        .map(|p| {
            let v = mu.integrate(&tent_function(mu.space(), p, gap)).unwrap();
            (v > -gap).then_some(v)
        })
        .collect()
}

fn inv_flatten_tents(config: &SuiteConfig, rng: &mut ChaCha8Rng) -> Tally {
    let mut t = Tally::new();
    for _ in 0..config.counts.invariant / 2 {
        let (space, _) = space(rng, 1, 6);
        let mu = sample::measure(rng, &space);
        let flat = MetaMeasure::unit(mu.clone()).flatten();
        t.instance();
        t.check(tent_profile(&flat, 10.0) == tent_profile(&mu, 10.0), || format!("tent profile differs for {mu:?}"));
        t.check(
            mu.atoms().iter().all(|&(p, w)| tent_profile(&mu, 10.0)[p] == Some(w)),
            || "tent basis does not recover weights".into(),
        );
    }
    t
}

fn hausdorff(space: &FiniteMetricSpace, a: &[usize], b: &[usize]) -> f64 {
    let one = |from: &[usize], to: &[usize]| {
        from.iter()
            .map(|&x| to.iter().map(|&y| space.d(x, y)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    one(a, b).max(one(b, a))
}

fn inv_hausdorff(config: &SuiteConfig, rng: &mut ChaCha8Rng) -> Tally {
    let mut t = Tally::new();
    for _ in 0..config.counts.invariant {
        let (space, _) = space(rng, 1, 6);
        let supports: Vec<Vec<usize>> = (0..2)
            .map(|_| sample::measure(rng, &space).support())
            .collect();
        let flat: Vec<IdempotentMeasure> = supports
            .iter()
            .map(|s| {
                let raw: Vec<_> = s.iter().map(|&p| (p, RMax::UNIT)).collect();
                IdempotentMeasure::canonicalize(&space, &raw, Normalization::Strict).unwrap()
            })
            .collect();
        let n = rng.gen_range(1..=5);
        t.instance();
        let got = hat_d(n, &flat[0], &flat[1]).unwrap().value;
        let want = f64::from(n) * hausdorff(&space, &supports[0], &supports[1]);
        t.check(got == want, || format!("hat_d {got} vs n*Hausdorff {want}"));
    }
    t
}

fn inv_witness(config: &SuiteConfig, rng: &mut ChaCha8Rng) -> Tally {
    let mut t = Tally::new();
    for _ in 0..config.counts.invariant {
        let (space, _) = space(rng, 1, 6);
        let (mu, nu) = (sample::measure(rng, &space), sample::measure(rng, &space));
        let n = rng.gen_range(1..=5);
        let report = hat_d(n, &mu, &nu).unwrap();
        let phi = report.witness_function(&mu, &nu);
        let (lhs, rhs) = match report.direction {
            WitnessDirection::MuOverNu => (&mu, &nu),
            WitnessDirection::NuOverMu => (&nu, &mu),
        };
        let gap = lhs.integrate(&phi).unwrap() - rhs.integrate(&phi).unwrap();
        t.instance();
        t.at_most((gap - report.value).abs(), 0.0, config.tolerances.metric, || format!("witness gives {gap}, report {report:?}"));
    }
    t
}

fn inv_meta_oracle(config: &SuiteConfig, rng: &mut ChaCha8Rng) -> Tally {
    let tol = &config.tolerances;
    let mut t = Tally::new();
    let step = 2.0 * tol.oracle_step;
    let mut attempts = 0;
    while t.instances < config.counts.invariant / 10 && attempts < config.counts.invariant {
        attempts += 1;
        let k = rng.gen_range(2..=3);
        let (space, _) = sample::grid_space(rng, k, 4);
        let (big_m, big_n) = (sample::meta_measure(rng, &space, 2), sample::meta_measure(rng, &space, 2));
        let n = rng.gen_range(1..=2);
        let mut inner: Vec<IdempotentMeasure> = big_m.atoms().iter().chain(big_n.atoms()).map(|a| a.0.clone()).collect();
        inner.sort_by(|x, y| x.canonical_cmp(y));
        inner.dedup();
        let dist: Vec<Vec<f64>> = inner.iter().map(|x| inner.iter().map(|y| tilde_d(n, x, y).unwrap()).collect()).collect();
        let labels = (0..inner.len()).map(|i| format!("m{i}")).collect();
        // Degenerate or ulp-violating ground distances do not form a validated space; skip those.
        let Ok(induced) = FiniteMetricSpace::new(labels, dist) else { continue };
        let induced = Arc::new(induced);
        let lift = |meta: &MetaMeasure| {
            let raw: Vec<_> = meta
                .atoms()
                .iter()
                .map(|(m, w)| (inner.iter().position(|x| x == m).unwrap(), RMax::Finite(*w)))
                .collect();
            IdempotentMeasure::canonicalize(&induced, &raw, Normalization::Strict).unwrap()
        };
        let exact = hat_d_meta(n, n, &big_m, &big_n).unwrap().value;
        let oracle = oracle_sup(n, &lift(&big_m), &lift(&big_n), step).unwrap();
        t.instance();
        t.at_most(oracle, exact, tol.metric, || "oracle above meta closed form".into());
        t.at_most(exact, oracle, 2.0 * step, || "meta closed form above oracle".into());
    }
    t
}

fn inv_fset(config: &SuiteConfig, rng: &mut ChaCha8Rng) -> Tally {
    let mut t = Tally::new();
    for _ in 0..config.counts.invariant {
        let (space, _) = space(rng, 1, 6);
        let family: Vec<_> = (0..rng.gen_range(1..=4)).map(|_| sample::dyadic_measure(rng, &space)).collect();
        let coefficients = |rng: &mut ChaCha8Rng| {
            let mut c: Vec<RMax> = family.iter().map(|_| RMax::Finite(f64::from(rng.gen_range(-16i32..=0)) / 8.0)).collect();
            let top = rng.gen_range(0..c.len());
            c[top] = RMax::UNIT;
            c
        };
        let (c1, c2) = (coefficients(rng), coefficients(rng));
        let q1 = CStructureQuery::new(family.clone(), c1.clone()).unwrap();
        let q2 = CStructureQuery::new(family.clone(), c2.clone()).unwrap();
        let (e1, e2) = (f_set_element(&q1).unwrap(), f_set_element(&q2).unwrap());
        let beta = RMax::Finite(f64::from(rng.gen_range(-16i32..=0)) / 8.0);
        t.instance();

        // β ⊙ e1 ⊕ e2 has coefficients β + c1 ⊕ c2 on the same generators.
        let mixed = combine(&[(beta, &e1), (RMax::UNIT, &e2)]).unwrap();
        let direct: Vec<RMax> = c1.iter().zip(&c2).map(|(a, b)| beta.odot(*a).oplus(*b)).collect();
        let again = f_set_element(&CStructureQuery::new(family.clone(), direct).unwrap()).unwrap();
        t.check(mixed == again, || "F(A) not closed under combine".into());

        let extra = sample::measure(rng, &space);
        t.check(f_set_element(&q1.padded(&[extra]).unwrap()).unwrap() == e1, || "padding changed the element".into());

        let top = max_of(&family).unwrap();
        let zeros = CStructureQuery::new(family.clone(), vec![RMax::UNIT; family.len()]).unwrap();
        t.check(f_set_element(&zeros).unwrap() == top, || "max A not reproduced by zero coefficients".into());
        let gap = top.max_abs_weight().max(family.iter().map(|m| m.max_abs_weight()).fold(0.0, f64::max)) + 1.0;
        for p in 0..space.len() {
            let tent = tent_function(&space, p, gap);
            let t_top = top.integrate(&tent).unwrap();
            t.check(family.iter().all(|m| m.integrate(&tent).unwrap() <= t_top), || "max A does not dominate".into());
        }
    }
    t
}

fn inv_displacement(config: &SuiteConfig, rng: &mut ChaCha8Rng) -> Tally {
    let tol = &config.tolerances;
    let mut t = Tally::new();
    for _ in 0..config.counts.invariant / 2 {
        let k = rng.gen_range(2..=3);
        let (space, _) = sample::grid_space(rng, k, 4);
        let mu = sample::measure(rng, &space);
        let n = rng.gen_range(1..=2);
        let net = vec![rng.gen_range(0..k)];
        let lambda = -rng.gen_range(0.0..=3.0);
        let step = 4.0 * tol.oracle_step;
        let g1 = discretize_g1(&mu, &net).unwrap();
        let g2 = saturate_g2(&mu, lambda).unwrap();
        let b1 = g1_displacement_bound(n, &space, &net).unwrap();
        let b2 = g2_displacement_bound(n, lambda, &space);
        t.instance();
        t.check(g1.support().iter().all(|p| net.contains(p)), || "g1 image leaves the net".into());
        t.check(g2.support().len() == space.len(), || "g2 image lacks full support".into());
        t.at_most(hat_d(n, &g1, &mu).unwrap().value, b1, tol.metric, || "g1 bound".into());
        t.at_most(hat_d(n, &g2, &mu).unwrap().value, b2, tol.metric, || "g2 bound".into());
        t.at_most(oracle_sup(n, &g1, &mu, step).unwrap(), b1, tol.metric, || "g1 bound (oracle)".into());
        t.at_most(oracle_sup(n, &g2, &mu, step).unwrap(), b2, tol.metric, || "g2 bound (oracle)".into());
    }
    t
}

fn inv_bridge_injective(config: &SuiteConfig, rng: &mut ChaCha8Rng) -> Tally {
    let mut t = Tally::new();
    for _ in 0..config.counts.invariant {
        let (space, _) = space(rng, 2, 4);
        let (mu, nu) = sample::distinct_pair(rng, &space);
        t.instance();
        let (pm, pn) = (gamma_to_delta(&measure_to_gamma(&mu)), gamma_to_delta(&measure_to_gamma(&nu)));
        t.check(pm != pn, || format!("{mu:?} and {nu:?} collide at {pm:?}"));
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resolutions_reach_the_target() {
        assert_eq!(gamma_resolution(2, 10_000), 5000);
        assert_eq!(gamma_resolution(3, 10_000), 58);
        assert_eq!(gamma_resolution(4, 10_000), 14);
        assert_eq!(delta_resolution(2, 10_000), 9999);
        assert_eq!(delta_resolution(3, 10_000), 140);
        assert_eq!(delta_resolution(4, 10_000), 38);
    }

    #[test]
    fn small_suite_is_deterministic_and_green() {
        let mut config = SuiteConfig::default();
        config.counts = Counts {
            oracle_spaces: 2,
            oracle_pairs: 2,
            axiom_triples: 20,
            isometry_spaces: 3,
            monad: 20,
            pushforward: 20,
            flatten: 10,
            ball: 20,
            homotopy: 20,
            separation: 10,
            bridge_points: 200,
            dap_samples: 20,
            aggregate_pairs: 10,
            invariant: 20,
        };
        let a = run_suite(&config);
        let b = run_suite(&config);
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        for check in a.criteria.iter().chain(&a.invariants) {
            assert!(check.passed, "{check:?}");
        }
    }
}
