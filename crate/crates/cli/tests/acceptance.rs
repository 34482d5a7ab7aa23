//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs the desk-scale grids (10⁵ bits per user, J = 10⁵), checks each
//! criterion and exits non-zero if any fails. Sweep CSVs are kept under the
//! cargo target temp directory for inspection.

use std::collections::HashMap;
use std::path::PathBuf;
use std::process::Command;
use std::time::Instant;

use ndnoma::harness::{resolve_workers, run_sweep, run_validation, write_csv, Scheme, SweepConfig, SweepRow};

/// Rates at or below this are not resolvable with 10⁵ bits.
const FLOOR: f64 = 1e-3;
const SEED: u64 = 1;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn grid(scheme: Scheme) -> SweepConfig {
    let mut c = SweepConfig::defaults(scheme);
    if scheme != Scheme::PdNomaComparison {
        c.k_db = vec![f64::NEG_INFINITY, 5.0, 10.0];
        c.n = vec![50, 100];
        c.x_db = vec![-40.0, -30.0, -20.0, -10.0, -5.0, 0.0, 5.0];
    }
    c.bits_per_point = 100_000;
    c.j_points = 100_000;
    c.seed = SEED;
    c
}

fn out_dir() -> PathBuf {
    let d = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("acceptance");
    std::fs::create_dir_all(&d).expect("create output directory");
    d
}

fn sweep(scheme: Scheme, workers: usize) -> Vec<SweepRow> {
    let start = Instant::now();
    let rows = run_sweep(&grid(scheme), workers).expect("sweep");
    let path = out_dir().join(format!("{}.csv", scheme.name()));
    write_csv(&rows, &path).expect("write csv");
    eprintln!(
        "  {} rows of {} in {:.1} s -> {}",
        rows.len(),
        scheme,
        start.elapsed().as_secs_f64(),
        path.display()
    );
    rows
}

/// Lookup by (user, k_db, n, x_db).
type Index<'a> = HashMap<(String, u64, usize, u64), &'a SweepRow>;

fn key(user: &str, k_db: f64, n: usize, x_db: f64) -> (String, u64, usize, u64) {
    (user.to_string(), k_db.to_bits(), n, x_db.to_bits())
}

fn index(rows: &[SweepRow]) -> Index<'_> {
    rows.iter().map(|r| (key(&r.user, r.k_db, r.n, r.x_db), r)).collect()
}

fn describe(r: &SweepRow) -> String {
    format!(
        "{} {} K={} N={} x={}: sim {:.3e}±{:.1e}, theory {:.3e}±{:.1e}",
        r.scheme, r.user, r.k_db, r.n, r.x_db, r.ber_sim, r.ci99, r.bep_theory, r.bep_se
    )
}

/// Criteria 1 and 2.
fn agreement(rows: &[SweepRow]) -> Outcome {
    let mut checked = 0;
    let mut failures = Vec::new();
    for r in rows {
        if r.ber_sim.max(r.bep_theory) <= FLOOR {
            continue;
        }
        checked += 1;
        let gap = (r.ber_sim - r.bep_theory).abs();
        let tol = r.ci99 + 3.0 * r.bep_se;
        if gap > tol {
            failures.push(format!("{} (gap {:.2e} > tol {:.2e})", describe(r), gap, tol));
        }
    }
    let mut detail = format!("{}/{checked} rows above {FLOOR:e} within ci99 + 3·se", checked - failures.len());
    for f in &failures {
        detail.push_str(&format!("\n      {f}"));
    }
    outcome(failures.is_empty() && checked > 0, detail)
}

/// Criterion 3: pick measured BERs when both endpoints clear the floor,
/// otherwise theoretical BEPs.
fn endpoints(idx: &Index, user: &str) -> (f64, f64, &'static str) {
    let a = idx[&key(user, 10.0, 50, -5.0)];
    let b = idx[&key(user, 10.0, 50, 5.0)];
    if a.ber_sim > FLOOR && b.ber_sim > FLOOR {
        (a.ber_sim, b.ber_sim, "sim")
    } else {
        (a.bep_theory, b.bep_theory, "theory")
    }
}

fn saturation(up: &[SweepRow], down: &[SweepRow]) -> Outcome {
    let (u_lo, u_hi, u_src) = endpoints(&index(up), "u1");
    let (d_lo, d_hi, d_src) = endpoints(&index(down), "u1");
    let change = (u_hi - u_lo).abs() / u_lo;
    let factor = d_lo / d_hi;
    let up_ok = change < 0.10;
    let down_ok = factor >= 2.0;
    outcome(
        up_ok && down_ok,
        format!(
            "uplink U1 ({u_src}) {u_lo:.3e} -> {u_hi:.3e}, relative change {:.1}% (need < 10%: {}); \
             downlink U1 ({d_src}) {d_lo:.3e} -> {d_hi:.3e}, factor {factor:.3e} (need >= 2: {})",
            100.0 * change,
            if up_ok { "ok" } else { "FAIL" },
            if down_ok { "ok" } else { "FAIL" },
        ),
    )
}

/// Criteria 4 and 5: `better` must not exceed `worse` beyond the joint CI
/// wherever both clear the floor.
fn ordering(sets: &[&[SweepRow]], pair: impl Fn(&SweepRow) -> Option<(String, u64, usize, u64)>, what: &str) -> Outcome {
    let mut checked = 0;
    let mut failures = Vec::new();
    for rows in sets {
        let idx = index(rows);
        for better in rows.iter() {
            let Some(k) = pair(better) else { continue };
            let Some(worse) = idx.get(&k) else { continue };
            if better.ber_sim <= FLOOR || worse.ber_sim <= FLOOR {
                continue;
            }
            checked += 1;
            if better.ber_sim > worse.ber_sim + better.ci99 + worse.ci99 {
                failures.push(format!("{} vs {}", describe(better), describe(worse)));
            }
        }
    }
    let mut detail = format!("{}/{checked} comparisons hold ({what})", checked - failures.len());
    for f in &failures {
        detail.push_str(&format!("\n      {f}"));
    }
    outcome(failures.is_empty() && checked > 0, detail)
}

fn average(idx: &Index, k: f64, n: usize, x: f64) -> (f64, f64) {
    let (a, b) = (idx[&key("u1", k, n, x)], idx[&key("u2", k, n, x)]);
    let bits = (a.bits + b.bits) as f64;
    let sim = (a.ber_sim * a.bits as f64 + b.ber_sim * b.bits as f64) / bits;
    (sim, 0.5 * (a.bep_theory + b.bep_theory))
}

fn oma_criterion(up: &[SweepRow], down: &[SweepRow], oma: &[SweepRow]) -> Outcome {
    let oi = index(oma);
    let mut failures = Vec::new();
    let mut sym_checked = 0;
    for r in oma.iter().filter(|r| r.user == "u1") {
        let o = oi[&key("u2", r.k_db, r.n, r.x_db)];
        sym_checked += 1;
        if (r.ber_sim - o.ber_sim).abs() > r.ci99 + o.ci99 {
            failures.push(format!("asymmetric: {} vs {}", describe(r), describe(o)));
        }
    }
    let (ui, di) = (index(up), index(down));
    let mut cmp_checked = 0;
    for r in oma.iter().filter(|r| r.user == "u1" && r.x_db >= -10.0) {
        let (o_sim, o_th) = average(&oi, r.k_db, r.n, r.x_db);
        for (name, idx) in [("uplink", &ui), ("downlink", &di)] {
            let (s, t) = average(idx, r.k_db, r.n, r.x_db);
            cmp_checked += 1;
            let (nd, om, src) = if o_sim > FLOOR { (s, o_sim, "sim") } else { (t, o_th, "theory") };
            if nd >= om {
                failures.push(format!(
                    "{name} K={} N={} δ={} ({src}): ND {nd:.3e} >= OMA {om:.3e}",
                    r.k_db, r.n, r.x_db
                ));
            }
        }
    }
    let mut detail = format!(
        "{sym_checked} OMA symmetry points, {cmp_checked} ND-vs-OMA comparisons on δ >= -10 dB; {} failures",
        failures.len()
    );
    for f in &failures {
        detail.push_str(&format!("\n      {f}"));
    }
    outcome(failures.is_empty(), detail)
}

fn pdnoma_criterion(rows: &[SweepRow]) -> Outcome {
    let idx = index(rows);
    let mut checked = 0;
    let mut failures = Vec::new();
    let mut trace = Vec::new();
    for pd in rows.iter().filter(|r| r.user == "pd-avg") {
        let nd = idx[&key("nd-avg", pd.k_db, pd.n, pd.x_db)];
        trace.push(format!("{:.1}dB ND {:.2e} / PD {:.2e}", pd.x_db, nd.ber_sim, pd.ber_sim));
        if pd.ber_sim <= FLOOR {
            continue;
        }
        checked += 1;
        if nd.ber_sim >= pd.ber_sim {
            failures.push(format!("{} vs {}", describe(nd), describe(pd)));
        }
    }
    let mut detail = format!(
        "{}/{checked} points with PD-NOMA above {FLOOR:e} have lower ND-NOMA average BER\n      {}",
        checked - failures.len(),
        trace.join("; ")
    );
    for f in &failures {
        detail.push_str(&format!("\n      {f}"));
    }
    outcome(failures.is_empty() && checked > 0, detail)
}

fn validity(workers: usize) -> Outcome {
    let checks = run_validation(SEED, workers).expect("validation suite");
    let passed = checks.iter().all(|c| c.passed);
    let lines: Vec<String> = checks
        .iter()
        .map(|c| format!("{} {}: {}", if c.passed { "ok" } else { "FAIL" }, c.name, c.detail))
        .collect();
    outcome(passed, format!("{} checks\n      {}", checks.len(), lines.join("\n      ")))
}

fn determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_ndnoma");
    let run = || {
        let out = Command::new(bin).arg("selftest-determinism").output().expect("spawn ndnoma");
        (out.status.success(), String::from_utf8_lossy(&out.stdout).trim().to_string())
    };
    let (ok_a, a) = run();
    let (ok_b, b) = run();
    outcome(
        ok_a && ok_b && a == b && a.len() == 64,
        format!("digests {a} / {b}"),
    )
}

fn main() {
    let env = std::env::var("NDNOMA_WORKERS").ok();
    let workers = resolve_workers(None, env.as_deref(), None).expect("worker count");
    eprintln!("acceptance: {workers} worker(s), seed {SEED}");

    let up = sweep(Scheme::UplinkNdNoma, workers);
    let down = sweep(Scheme::DownlinkNdNoma, workers);
    let oma = sweep(Scheme::OmaNoiseMod, workers);
    let start = Instant::now();
    let pd = sweep(Scheme::PdNomaComparison, workers);
    let pd_secs = start.elapsed().as_secs_f64();

    let n_pair = |r: &SweepRow| (r.n == 100).then(|| key(&r.user, r.k_db, 50, r.x_db));
    let k_pair = |r: &SweepRow| (r.k_db == 10.0).then(|| key(&r.user, 5.0, r.n, r.x_db));

    let results = [
        ("1 uplink theory/simulation agreement", agreement(&up)),
        ("2 downlink theory/simulation agreement", agreement(&down)),
        ("3 uplink saturation vs downlink decay", saturation(&up, &down)),
        ("4 N-scaling", ordering(&[&up, &down, &oma], n_pair, "BER(N=100) <= BER(N=50)")),
        ("5 K-scaling", ordering(&[&up, &down, &oma], k_pair, "BER(K=10 dB) <= BER(K=5 dB)")),
        ("6 OMA symmetry and ND-NOMA advantage", oma_criterion(&up, &down, &oma)),
        ("7 ND-NOMA vs PD-NOMA", {
            let mut o = pdnoma_criterion(&pd);
            o.detail.push_str(&format!("\n      sweep time {pd_secs:.1} s"));
            o
        }),
        ("8 estimator validity suite", validity(workers)),
        ("9 determinism", determinism()),
    ];

    let mut failed = 0;
    for (name, o) in &results {
        println!("criterion {name}: {} — {}", if o.passed { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.passed);
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
