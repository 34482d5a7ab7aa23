//! Deterministic parallel sweep execution.
//!
//! A sweep is split into tasks: simulation blocks of at most
//! [`SIM_BLOCK`] frames and integration chunks of at most [`THEORY_CHUNK`]
//! channel draws. Each task owns the random stream
//! `(seed, point, purpose, block)`, tasks run on a fixed-size pool, results
//! come back in task order and are reduced sequentially. Output therefore
//! depends only on the configuration and the seed, not on the worker count.

use std::time::Instant;

use rayon::prelude::*;

use super::config::{db_to_linear, Scheme, SweepConfig, XKind};
use crate::benchmarks::{
    cond_bep_oma, cond_bep_pd_far, cond_bep_pd_near, nd_noma_params_at, oma_noisemod_ber,
    pd_noma_downlink_ber, OmaParams, PdNomaParams,
};
use crate::ber::ErrorCount;
use crate::channel::{ChannelRealization, FadingModel};
use crate::downlink::{self, DownlinkParams};
use crate::error::{Error, Result};
use crate::rng::{stream_rng, StreamId};
use crate::theory::{accumulate_weights, ChannelArity, WeightAccumulator};
use crate::uplink::{self, UplinkParams};

/// Frames simulated per task.
pub const SIM_BLOCK: u64 = 10_000;
/// Channel draws integrated per task.
pub const THEORY_CHUNK: u64 = 10_000;

/// One output line: a user at one operating point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub scheme: Scheme,
    pub user: String,
    pub k_db: f64,
    pub n: usize,
    pub x_db: f64,
    pub x_kind: XKind,
    pub ber_sim: f64,
    pub ci99: f64,
    pub bep_theory: f64,
    pub bep_se: f64,
    pub bits: u64,
    pub wall_s: f64,
}

#[derive(Debug, Clone, Copy)]
enum Model {
    Uplink(UplinkParams<f64>),
    Downlink(DownlinkParams<f64>),
    Oma(OmaParams<f64>),
    Comparison {
        nd: DownlinkParams<f64>,
        pd: PdNomaParams<f64>,
    },
}

impl Model {
    /// Number of independently integrated conditional BEPs.
    fn theory_slots(&self) -> usize {
        match self {
            Model::Uplink(_) | Model::Downlink(_) => 2,
            Model::Oma(_) => 1,
            Model::Comparison { .. } => 4,
        }
    }

    fn arity(&self) -> ChannelArity {
        match self {
            Model::Uplink(_) => ChannelArity::Two,
            _ => ChannelArity::One,
        }
    }

    fn cond_bep(&self, slot: usize, h: &[ChannelRealization<f64>]) -> Result<f64> {
        Ok(match (self, slot) {
            (Model::Uplink(p), 0) => uplink::cond_bep_u1_uplink(h[0], h[1], p)?,
            (Model::Uplink(p), _) => uplink::cond_bep_u2_uplink(h[0], h[1], p),
            (Model::Downlink(p), 0) | (Model::Comparison { nd: p, .. }, 0) => {
                downlink::cond_bep_u1_downlink(h[0], p)?
            }
            (Model::Downlink(p), _) | (Model::Comparison { nd: p, .. }, 1) => {
                downlink::cond_bep_u2_downlink(h[0], p)
            }
            (Model::Comparison { pd, .. }, 2) => cond_bep_pd_far(h[0], pd),
            (Model::Comparison { pd, .. }, _) => cond_bep_pd_near(h[0], pd),
            (Model::Oma(p), _) => cond_bep_oma(h[0], p),
        })
    }

    /// Simulates `frames` frames; counts in the order of the theory slots.
    fn simulate(&self, fading: &FadingModel<f64>, frames: u64, rng: &mut crate::rng::SimRng) -> Result<Vec<ErrorCount>> {
        Ok(match self {
            Model::Uplink(p) => uplink::simulate(p, fading, frames, rng)?.to_vec(),
            Model::Downlink(p) => downlink::simulate(p, fading, frames, rng)?.to_vec(),
            Model::Oma(p) => oma_noisemod_ber(p, fading, frames, rng).to_vec(),
            Model::Comparison { nd, pd } => {
                let c = downlink::simulate(nd, fading, frames, rng)?;
                let d = pd_noma_downlink_ber(pd, fading, frames, rng);
                vec![c[0], c[1], d.far, d.near]
            }
        })
    }
}

#[derive(Debug, Clone, Copy)]
struct Point {
    k_db: f64,
    n: usize,
    x_db: f64,
    fading: FadingModel<f64>,
    model: Model,
}

fn build_points(cfg: &SweepConfig) -> Result<Vec<Point>> {
    cfg.validate()?;
    let p = cfg.p_watts();
    let mut points = Vec::with_capacity(cfg.n_points());
    for &k_db in &cfg.k_db {
        let fading = FadingModel::from_k_db(k_db)?;
        for &n in &cfg.n {
            for &x_db in &cfg.x_db {
                let x = db_to_linear(x_db);
                let rule = cfg.u2_threshold;
                let model = match cfg.scheme {
                    Scheme::UplinkNdNoma => {
                        Model::Uplink(UplinkParams::derive(p, cfg.beta, cfg.alpha, x, n)?.with_threshold(rule))
                    }
                    Scheme::DownlinkNdNoma => Model::Downlink(
                        DownlinkParams::derive(p, cfg.psi, cfg.alpha, x, n)?.with_threshold(rule),
                    ),
                    Scheme::OmaNoiseMod => Model::Oma(OmaParams::derive(p, cfg.alpha, x, n)?),
                    Scheme::PdNomaComparison => Model::Comparison {
                        nd: nd_noma_params_at(x, cfg.psi, cfg.alpha, n)?.with_threshold(rule),
                        pd: PdNomaParams::new(x, cfg.rho_far)?,
                    },
                };
                points.push(Point {
                    k_db,
                    n,
                    x_db,
                    fading,
                    model,
                });
            }
        }
    }
    Ok(points)
}

#[derive(Debug, Clone, Copy)]
enum Task {
    Sim { point: usize, block: u64, frames: u64 },
    Theory { point: usize, slot: usize, chunk: u64, count: u64 },
}

enum TaskOutput {
    Sim(Vec<ErrorCount>),
    Theory(WeightAccumulator<f64>),
}

fn split(total: u64, size: u64) -> impl Iterator<Item = (u64, u64)> {
    (0..total.div_ceil(size)).map(move |i| (i, size.min(total - i * size)))
}

fn plan(cfg: &SweepConfig, points: &[Point]) -> Vec<Task> {
    let mut tasks = Vec::new();
    for (i, pt) in points.iter().enumerate() {
        for (block, frames) in split(cfg.bits_per_point, SIM_BLOCK) {
            tasks.push(Task::Sim { point: i, block, frames });
        }
        for slot in 0..pt.model.theory_slots() {
            for (chunk, count) in split(cfg.j_points, THEORY_CHUNK) {
                tasks.push(Task::Theory { point: i, slot, chunk, count });
            }
        }
    }
    tasks
}

fn run_task(seed: u64, points: &[Point], task: Task) -> Result<(TaskOutput, f64)> {
    let start = Instant::now();
    let out = match task {
        Task::Sim { point, block, frames } => {
            let pt = &points[point];
            let mut rng = stream_rng(seed, StreamId::new(point as u64, 0, block));
            TaskOutput::Sim(pt.model.simulate(&pt.fading, frames, &mut rng)?)
        }
        Task::Theory { point, slot, chunk, count } => {
            let pt = &points[point];
            let mut rng = stream_rng(seed, StreamId::new(point as u64, 1 + slot as u64, chunk));
            let f = |h: &[ChannelRealization<f64>]| pt.model.cond_bep(slot, h);
            TaskOutput::Theory(accumulate_weights(f, &pt.fading, pt.model.arity(), count, &mut rng)?)
        }
    };
    Ok((out, start.elapsed().as_secs_f64()))
}

/// Resolves the worker count: explicit value, then the `NDNOMA_WORKERS`
/// environment value, then the configuration, then the machine's
/// parallelism.
pub fn resolve_workers(flag: Option<usize>, env: Option<&str>, config: Option<usize>) -> Result<usize> {
    let from_env = match env {
        Some(v) if !v.trim().is_empty() => Some(
            v.trim()
                .parse::<usize>()
                .map_err(|_| Error::Config(format!("NDNOMA_WORKERS: cannot parse '{v}'")))?,
        ),
        _ => None,
    };
    let w = flag
        .or(from_env)
        .or(config)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if w == 0 {
        return Err(Error::Config("worker count must be positive".into()));
    }
    Ok(w)
}

/// Runs every grid point of `cfg` on `workers` threads.
pub fn run_sweep(cfg: &SweepConfig, workers: usize) -> Result<Vec<SweepRow>> {
    let points = build_points(cfg)?;
    let tasks = plan(cfg, &points);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Internal(format!("cannot start worker pool: {e}")))?;
    let seed = cfg.seed;
    let outputs: Vec<Result<(TaskOutput, f64)>> =
        pool.install(|| tasks.par_iter().map(|&t| run_task(seed, &points, t)).collect());

    struct Acc {
        sim: Vec<ErrorCount>,
        theory: Vec<WeightAccumulator<f64>>,
        seconds: f64,
    }
    let mut accs: Vec<Acc> = points
        .iter()
        .map(|p| Acc {
            sim: Vec::new(),
            theory: vec![WeightAccumulator::default(); p.model.theory_slots()],
            seconds: 0.0,
        })
        .collect();
    for (task, out) in tasks.iter().zip(outputs) {
        let (out, secs) = out?;
        match (task, out) {
            (Task::Sim { point, .. }, TaskOutput::Sim(counts)) => {
                let acc = &mut accs[*point];
                if acc.sim.is_empty() {
                    acc.sim = vec![ErrorCount::default(); counts.len()];
                }
                for (a, c) in acc.sim.iter_mut().zip(counts) {
                    a.merge(c);
                }
                acc.seconds += secs;
            }
            (Task::Theory { point, slot, .. }, TaskOutput::Theory(w)) => {
                accs[*point].theory[*slot].merge(&w);
                accs[*point].seconds += secs;
            }
            _ => return Err(Error::Internal("task output does not match its task".into())),
        }
    }

    let mut rows = Vec::new();
    for (pt, acc) in points.iter().zip(accs) {
        let wall_s = if cfg.timing { acc.seconds } else { 0.0 };
        let est: Vec<(f64, f64)> = acc
            .theory
            .iter()
            .map(|w| {
                let e = w.estimate();
                (e.value, e.std_error)
            })
            .collect();
        let mut push = |user: &str, count: ErrorCount, (theory, se): (f64, f64)| {
            rows.push(SweepRow {
                scheme: cfg.scheme,
                user: user.to_string(),
                k_db: pt.k_db,
                n: pt.n,
                x_db: pt.x_db,
                x_kind: cfg.scheme.x_kind(),
                ber_sim: count.rate(),
                ci99: count.ci99(),
                bep_theory: theory,
                bep_se: se,
                bits: count.bits,
                wall_s,
            })
        };
        let avg = |a: (f64, f64), b: (f64, f64)| (0.5 * (a.0 + b.0), 0.5 * (a.1.hypot(b.1)));
        match pt.model {
            Model::Uplink(_) | Model::Downlink(_) => {
                push("u1", acc.sim[0], est[0]);
                push("u2", acc.sim[1], est[1]);
            }
            Model::Oma(_) => {
                push("u1", acc.sim[0], est[0]);
                push("u2", acc.sim[1], est[0]);
            }
            Model::Comparison { .. } => {
                let s = &acc.sim;
                push("nd-u1", s[0], est[0]);
                push("nd-u2", s[1], est[1]);
                push("nd-avg", s[0].merged(s[1]), avg(est[0], est[1]));
                push("pd-far", s[2], est[2]);
                push("pd-near", s[3], est[3]);
                push("pd-avg", s[2].merged(s[3]), avg(est[2], est[3]));
            }
        }
    }
    Ok(rows)
}
