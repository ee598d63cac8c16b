//! Genetic-algorithm search over `(E, φ, ω)`.
//!
//! Maximize the superimposed MED subject to
//!
//! * `MPD(Γ) ≥ κ`
//! * `Σ E_i = M·J/K`, `E_i > 0`
//! * `0 < φ_i < π`
//! * `ω > 1`
//!
//! The genome is `d_f` energies, `d_f` phases and ω. Energies are pulled back
//! onto the budget by a multiplicative rescale after every variation step, so
//! the equality constraint always holds exactly. The MPD floor is a hard
//! constraint: an infeasible individual ranks below every feasible one and
//! infeasible individuals are ordered among themselves by MPD.

use std::cmp::Ordering;
use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::codebook::{build_from_design, DEFAULT_ENUMERATION_CAP};
use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::metrics::{self, ExactOptions, MonteCarloOptions};
use crate::rng;
use crate::signature::{energy_target, SignatureTemplate};

const GA_STREAM: u64 = 0x4741;
const EVAL_STREAM: u64 = 0x4556;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignPoint {
    #[serde(rename = "E")]
    pub energies: Vec<f64>,
    #[serde(rename = "phi")]
    pub phases: Vec<f64>,
    pub omega: f64,
}

/// Rescale positive `raw` values so they sum to `target_sum`, keeping ratios.
pub fn project_energies(raw: &[f64], target_sum: f64) -> Result<Vec<f64>> {
    if let Some(bad) = raw.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
        return Err(Error::InvalidWeights(format!("energy {bad} is not positive")));
    }
    if !(target_sum.is_finite() && target_sum > 0.0) {
        return Err(Error::InvalidParameter(format!("target sum {target_sum} is not positive")));
    }
    let sum: f64 = raw.iter().sum();
    let mut out: Vec<f64> = raw.iter().map(|v| v * target_sum / sum).collect();
    // absorb the last rounding ulp so the sum is as close to the target as possible
    let drift = target_sum - out.iter().sum::<f64>();
    if let Some(largest) = out
        .iter_mut()
        .max_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal))
    {
        *largest += drift;
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum MedChoice {
    /// Exact when the constellation is small enough (`M^J ≤ 4096`), Monte
    /// Carlo otherwise.
    #[default]
    Auto,
    Exact,
    MonteCarlo,
}

/// Largest constellation the automatic choice still enumerates exactly.
pub const AUTO_EXACT_LIMIT: u128 = 4096;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GaConfig {
    pub population_size: usize,
    pub generations: usize,
    pub kappa: f64,
    pub med_method: MedChoice,
    /// Q
    pub mc_samples: usize,
    /// t_max
    pub mc_iterations: usize,
    pub seed: u64,
    pub crossover_rate: f64,
    pub mutation_rate: f64,
    /// Gaussian mutation standard deviation as a fraction of each gene's box.
    pub mutation_scale: f64,
    pub elitism_count: usize,
    pub tournament_size: usize,
    pub omega_max: f64,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            population_size: 50,
            generations: 50,
            kappa: 0.54,
            med_method: MedChoice::Auto,
            mc_samples: 5000,
            mc_iterations: 20,
            seed: 0,
            crossover_rate: 0.9,
            mutation_rate: 0.1,
            mutation_scale: 0.05,
            elitism_count: 2,
            tournament_size: 2,
            omega_max: 10.0,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.population_size < 2 {
            return fail(format!("population_size must be >= 2, got {}", self.population_size));
        }
        if self.generations < 1 {
            return fail("generations must be >= 1".into());
        }
        if self.elitism_count >= self.population_size {
            return fail("elitism_count must be smaller than population_size".into());
        }
        if self.tournament_size < 1 {
            return fail("tournament_size must be >= 1".into());
        }
        for (name, rate) in [
            ("crossover_rate", self.crossover_rate),
            ("mutation_rate", self.mutation_rate),
        ] {
            if !(0.0..=1.0).contains(&rate) {
                return fail(format!("{name} must lie in [0, 1], got {rate}"));
            }
        }
        if !(self.mutation_scale.is_finite() && self.mutation_scale >= 0.0) {
            return fail(format!("mutation_scale must be >= 0, got {}", self.mutation_scale));
        }
        if !self.kappa.is_finite() {
            return fail("kappa must be finite".into());
        }
        if !(self.omega_max.is_finite() && self.omega_max > 1.0) {
            return fail(format!("omega_max must exceed 1, got {}", self.omega_max));
        }
        if self.mc_samples < 2 || self.mc_iterations < 1 {
            return fail("mc_samples must be >= 2 and mc_iterations >= 1".into());
        }
        Ok(())
    }

    fn use_exact(&self, constellation_size: u128) -> bool {
        match self.med_method {
            MedChoice::Exact => true,
            MedChoice::MonteCarlo => false,
            MedChoice::Auto => constellation_size <= AUTO_EXACT_LIMIT,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitnessReport {
    /// `None` when the MED was not computed (infeasible candidate in the GA).
    pub med: Option<f64>,
    pub mpd: f64,
    pub feasible: bool,
}

impl FitnessReport {
    /// MED for feasible points, `-∞` otherwise.
    pub fn fitness(&self) -> f64 {
        match (self.feasible, self.med) {
            (true, Some(m)) => m,
            _ => f64::NEG_INFINITY,
        }
    }

    fn rank(&self, other: &Self) -> Ordering {
        match (self.feasible, other.feasible) {
            (true, false) => Ordering::Greater,
            (false, true) => Ordering::Less,
            (true, true) => self.fitness().total_cmp(&other.fitness()),
            (false, false) => self.mpd.total_cmp(&other.mpd),
        }
    }
}

fn evaluate(
    point: &DesignPoint,
    order: usize,
    template: &SignatureTemplate,
    cfg: &GaConfig,
    med_seed: u64,
    skip_infeasible: bool,
    exec: Execution,
) -> Result<FitnessReport> {
    let mpd = metrics::gamma_mpd(template, &point.energies, order, point.omega)?;
    let feasible = mpd >= cfg.kappa;
    if skip_infeasible && !feasible {
        return Ok(FitnessReport {
            med: None,
            mpd,
            feasible,
        });
    }
    let set = build_from_design(template, order, point)?;
    let med = if cfg.use_exact(set.dims().constellation_size()) {
        metrics::med_exact_with(
            &set,
            ExactOptions {
                cap: DEFAULT_ENUMERATION_CAP,
                exec,
            },
        )?
    } else {
        let mut opts = MonteCarloOptions::new(cfg.mc_samples, cfg.mc_iterations, med_seed);
        opts.exec = exec;
        metrics::med_monte_carlo(&set, opts)?
    };
    Ok(FitnessReport {
        med: Some(med.value),
        mpd,
        feasible,
    })
}

/// Build the codebooks for `point` and score it: MPD from the closed-form
/// scaling, MED by the configured method, feasibility against `κ`.
pub fn evaluate_candidate(
    point: &DesignPoint,
    order: usize,
    template: &SignatureTemplate,
    cfg: &GaConfig,
) -> Result<FitnessReport> {
    evaluate(point, order, template, cfg, cfg.seed, false, Execution::default())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationRecord {
    pub generation: usize,
    /// Best feasible MED so far; `None` until a feasible individual appears.
    pub best_med: Option<f64>,
    /// MPD of the current best individual.
    pub best_mpd: f64,
    pub feasible_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationResult {
    pub best: DesignPoint,
    pub best_med: f64,
    pub best_mpd: f64,
    pub kappa: f64,
    pub seed: u64,
    pub history: Vec<GenerationRecord>,
    pub evaluations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfeasibleReport {
    pub kappa: f64,
    pub best_mpd: f64,
    pub best: DesignPoint,
    pub evaluations: usize,
}

/// Per-gene search interval `[lo, hi]`; open ends are pulled in by a hair.
#[derive(Debug, Clone)]
struct SearchBox {
    lo: Vec<f64>,
    hi: Vec<f64>,
    df: usize,
    target: f64,
}

impl SearchBox {
    fn new(df: usize, target: f64, omega_max: f64) -> Self {
        let eps = |w: f64| w * 1e-6;
        let mut lo = Vec::with_capacity(2 * df + 1);
        let mut hi = Vec::with_capacity(2 * df + 1);
        for _ in 0..df {
            lo.push(eps(target));
            hi.push(target);
        }
        for _ in 0..df {
            lo.push(eps(PI));
            hi.push(PI - eps(PI));
        }
        lo.push(1.0 + eps(omega_max - 1.0));
        hi.push(omega_max);
        Self { lo, hi, df, target }
    }

    fn width(&self, g: usize) -> f64 {
        self.hi[g] - self.lo[g]
    }

    fn clamp(&self, genes: &mut [f64]) {
        for (g, v) in genes.iter_mut().enumerate() {
            *v = v.clamp(self.lo[g], self.hi[g]);
        }
    }

    fn random(&self, rng: &mut impl Rng) -> Vec<f64> {
        (0..self.lo.len())
            .map(|g| rng.random_range(self.lo[g]..=self.hi[g]))
            .collect()
    }

    fn decode(&self, genes: &[f64]) -> Result<DesignPoint> {
        Ok(DesignPoint {
            energies: project_energies(&genes[..self.df], self.target)?,
            phases: genes[self.df..2 * self.df].to_vec(),
            omega: genes[2 * self.df],
        })
    }

    fn encode(&self, p: &DesignPoint) -> Vec<f64> {
        p.energies
            .iter()
            .chain(&p.phases)
            .copied()
            .chain(std::iter::once(p.omega))
            .collect()
    }
}

#[derive(Debug, Clone)]
struct Individual {
    point: DesignPoint,
    report: FitnessReport,
}

fn tournament<'a>(pop: &'a [Individual], size: usize, rng: &mut impl Rng) -> &'a Individual {
    let mut best = &pop[rng.random_range(0..pop.len())];
    for _ in 1..size {
        let c = &pop[rng.random_range(0..pop.len())];
        if c.report.rank(&best.report) == Ordering::Greater {
            best = c;
        }
    }
    best
}

/// Sort best-first; ties keep their previous order.
fn sort_population(pop: &mut [Individual]) {
    pop.sort_by(|a, b| b.report.rank(&a.report));
}

pub fn ga_optimize(order: usize, template: &SignatureTemplate, cfg: &GaConfig) -> Result<OptimizationResult> {
    ga_optimize_with(order, template, cfg, Execution::default())
}

/// Run the GA. Individual `i` of generation `g` draws its randomness from a
/// stream keyed on `(seed, g, i)` and fitness evaluations run in parallel, so
/// the result depends only on the configuration.
pub fn ga_optimize_with(
    order: usize,
    template: &SignatureTemplate,
    cfg: &GaConfig,
    exec: Execution,
) -> Result<OptimizationResult> {
    cfg.validate()?;
    crate::mother_constellation::check_domain(order, 2.0)?;
    let target = energy_target(order, template.users(), template.resources());
    let space = SearchBox::new(template.df(), target, cfg.omega_max);
    let genes = 2 * template.df() + 1;

    // Inner metric work stays sequential: the population is the parallel axis.
    let eval = |point: DesignPoint, g: usize, i: usize| -> Result<Individual> {
        let med_seed = rng::derive_seed(cfg.seed, &[EVAL_STREAM, g as u64, i as u64]);
        let report = evaluate(&point, order, template, cfg, med_seed, true, Execution::Sequential)?;
        Ok(Individual { point, report })
    };

    let mut population = exec::map_collect(exec, cfg.population_size, |i| {
        let mut rng = rng::stream(cfg.seed, &[GA_STREAM, 0, i as u64]);
        eval(space.decode(&space.random(&mut rng))?, 0, i)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let mut evaluations = population.len();
    sort_population(&mut population);

    let mut history = Vec::with_capacity(cfg.generations);
    for g in 1..=cfg.generations {
        let parents = &population;
        let children = exec::map_collect(exec, cfg.population_size - cfg.elitism_count, |c| {
            let i = c + cfg.elitism_count;
            let mut rng = rng::stream(cfg.seed, &[GA_STREAM, g as u64, i as u64]);
            let a = space.encode(&tournament(parents, cfg.tournament_size, &mut rng).point);
            let b = space.encode(&tournament(parents, cfg.tournament_size, &mut rng).point);
            let mut child = if rng.random_bool(cfg.crossover_rate) {
                (0..genes)
                    .map(|k| if rng.random_bool(0.5) { a[k] } else { b[k] })
                    .collect()
            } else {
                a
            };
            for (k, v) in child.iter_mut().enumerate() {
                if rng.random_bool(cfg.mutation_rate) {
                    let sd = cfg.mutation_scale * space.width(k);
                    if sd > 0.0 {
                        *v += Normal::new(0.0, sd).expect("positive sd").sample(&mut rng);
                    }
                }
            }
            space.clamp(&mut child);
            eval(space.decode(&child)?, g, i)
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
        evaluations += children.len();

        population.truncate(cfg.elitism_count);
        population.extend(children);
        sort_population(&mut population);

        let best = &population[0];
        history.push(GenerationRecord {
            generation: g,
            best_med: best.report.feasible.then(|| best.report.fitness()),
            best_mpd: best.report.mpd,
            feasible_count: population.iter().filter(|p| p.report.feasible).count(),
        });
    }

    let best = &population[0];
    if !best.report.feasible {
        return Err(Error::Infeasible(Box::new(InfeasibleReport {
            kappa: cfg.kappa,
            best_mpd: best.report.mpd,
            best: best.point.clone(),
            evaluations,
        })));
    }
    Ok(OptimizationResult {
        best: best.point.clone(),
        best_med: best.report.fitness(),
        best_mpd: best.report.mpd,
        kappa: cfg.kappa,
        seed: cfg.seed,
        history,
        evaluations,
    })
}
