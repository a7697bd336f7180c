//! Empirical diagnostics: convergence-assumption tables, weak-convergence
//! probes, orthonormality-error curves, and timing comparisons, plus the
//! fixed-schema CSV emitters for each.

use std::path::Path;
use std::time::Instant;

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::frames::{projection_coefficient_table, FrameSystem, Regularization};
use crate::ortho::modified_gram_schmidt;
use crate::recon::{reconstruct_with, Method};
use crate::training::{ToleranceConfig, TrainingSet};

/// Which coefficient route the assumption report uses for the `l1` sums.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoefficientPath {
    /// Inner products of the truth against the orthonormalized inputs.
    Ortho,
    /// Dual-frame analysis coefficients of the truth against the raw
    /// inputs.
    Frame,
}

/// One `(i, n)` cell of an assumption table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssumptionRow {
    /// 1-based index of the family member being expanded.
    pub i: usize,
    /// Size of the leading subfamily it was expanded over.
    pub n: usize,
    pub value: f64,
}

/// Finite-scale surrogates for the convergence assumptions.
///
/// All indices are 1-based.  `l1_partial_sums[m-1]` is the partial sum
/// `Σ_{i<=m} |a_i|` of the truth's expansion coefficients.  A `beta` row
/// `(i, n)` (only for `i > n`) holds `Σ_j β_j²` where `β` expands the
/// projection of the i-th *orthonormalized-input image* over the first
/// `n` of them; a `c` row holds the same sum for the raw training
/// outputs.  The sups are the observed maxima (0 over an empty table).
#[derive(Debug, Clone)]
pub struct AssumptionReport {
    pub l1_partial_sums: Vec<f64>,
    pub beta_rows: Vec<AssumptionRow>,
    pub beta_max: f64,
    pub c_rows: Vec<AssumptionRow>,
    pub c_max: f64,
}

/// Builds the assumption tables for a training set and a ground truth.
///
/// The orthonormalized *inputs* and their carried images come from the
/// paired recursion run with the roles of inputs and outputs swapped, so
/// nothing here applies an operator either.  `schedule` lists the
/// subfamily sizes `n`; each must be at most the number of pairs.
pub fn assumption_report(
    ts: &TrainingSet,
    u_dagger: &DVector<f64>,
    schedule: &[usize],
    path: CoefficientPath,
    regularization: Regularization,
) -> Result<AssumptionReport> {
    if u_dagger.len() != ts.input_dim() {
        return Err(Error::DimensionMismatch { expected: ts.input_dim(), got: u_dagger.len() });
    }
    let total = ts.len();
    for &n in schedule {
        if n == 0 || n > total {
            return Err(Error::Config(format!("schedule entry {n} must lie in 1..={total}")));
        }
    }

    // Orthonormalize the inputs with the outputs mirrored along.
    let swapped = ts.swapped()?;
    let mirror = modified_gram_schmidt(&swapped, &ToleranceConfig::default())?;
    let ortho_inputs = &mirror.ortho_outputs; // k x r
    let carried_images = &mirror.preimages; // h x r

    let l1_coeffs: Vec<f64> = match path {
        CoefficientPath::Ortho => {
            ortho_inputs.tr_mul(u_dagger).iter().cloned().collect()
        }
        CoefficientPath::Frame => {
            let fs = FrameSystem::from_outputs(&ts.inputs, regularization)?;
            let rhs = ts.inputs.tr_mul(u_dagger);
            fs.solve_gram(&rhs)?.iter().cloned().collect()
        }
    };
    let mut l1_partial_sums = Vec::with_capacity(l1_coeffs.len());
    let mut acc = 0.0;
    for a in &l1_coeffs {
        acc += a.abs();
        l1_partial_sums.push(acc);
    }

    // beta table over the carried images of the orthonormalized inputs.
    let r = carried_images.ncols();
    let mut beta_rows = Vec::new();
    for &n in schedule {
        if n >= r {
            continue;
        }
        let table = projection_coefficient_table(carried_images, n, regularization)?;
        for i in (n + 1)..=r {
            beta_rows.push(AssumptionRow { i, n, value: table.column(i - 1).norm_squared() });
        }
    }
    let beta_max = beta_rows.iter().map(|row| row.value).fold(0.0f64, f64::max);

    // c table over the raw training outputs.
    let mut c_rows = Vec::new();
    for &n in schedule {
        let table = projection_coefficient_table(&ts.outputs, n, regularization)?;
        for i in 1..=total {
            c_rows.push(AssumptionRow { i, n, value: table.column(i - 1).norm_squared() });
        }
    }
    let c_max = c_rows.iter().map(|row| row.value).fold(0.0f64, f64::max);

    Ok(AssumptionReport { l1_partial_sums, beta_rows, beta_max, c_rows, c_max })
}

/// One pairing `|⟨u_n - u†, φ⟩|` of a reconstruction sequence against a
/// probe functional.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeRow {
    pub probe: String,
    pub n: usize,
    pub pairing: f64,
}

/// Probe pairings plus one trend statistic per probe.
#[derive(Debug, Clone)]
pub struct ProbeTable {
    pub rows: Vec<ProbeRow>,
    /// `(probe, fraction of strictly decreasing steps)` in the order the
    /// reconstructions were given.
    pub trends: Vec<(String, f64)>,
}

/// Evaluates `|⟨u_n - u†, φ⟩|` for every reconstruction scale and every
/// probe.
///
/// Weak convergence has no finite-sample certificate, so the table only
/// reports the pairings and, per probe, the fraction of steps on which
/// the pairing strictly decreased.
pub fn weak_convergence_probe(
    reconstructions: &[(usize, DVector<f64>)],
    u_dagger: &DVector<f64>,
    probes: &[(String, DVector<f64>)],
) -> Result<ProbeTable> {
    let k = u_dagger.len();
    for (_, u) in reconstructions {
        if u.len() != k {
            return Err(Error::DimensionMismatch { expected: k, got: u.len() });
        }
    }
    for (_, phi) in probes {
        if phi.len() != k {
            return Err(Error::DimensionMismatch { expected: k, got: phi.len() });
        }
    }
    let mut rows = Vec::with_capacity(reconstructions.len() * probes.len());
    let mut trends = Vec::with_capacity(probes.len());
    for (label, phi) in probes {
        let mut prev: Option<f64> = None;
        let mut decreasing = 0usize;
        for (n, u) in reconstructions {
            let pairing = (u - u_dagger).dot(phi).abs();
            rows.push(ProbeRow { probe: label.clone(), n: *n, pairing });
            if let Some(p) = prev {
                if pairing < p {
                    decreasing += 1;
                }
            }
            prev = Some(pairing);
        }
        let steps = reconstructions.len().saturating_sub(1);
        let fraction = if steps == 0 { 0.0 } else { decreasing as f64 / steps as f64 };
        trends.push((label.clone(), fraction));
    }
    Ok(ProbeTable { rows, trends })
}

/// One measured orthonormality error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsRecord {
    pub method: Method,
    pub n: usize,
    pub seed: u64,
    pub eps: f64,
}

/// Orthonormality error of each backend across scales and column orders.
///
/// Every seed draws one random permutation of the training pairs; each
/// scale `n` then orthonormalizes the first `n` permuted pairs.  The
/// frame method has no orthonormality error and is rejected.
pub fn ortho_error_curve(
    ts: &TrainingSet,
    methods: &[Method],
    schedule: &[usize],
    permutation_seeds: &[u64],
    cfg: &ToleranceConfig,
) -> Result<Vec<EpsRecord>> {
    if methods.iter().any(|&m| m == Method::Frame) {
        return Err(Error::Config("the frame path has no orthonormality error".into()));
    }
    for &n in schedule {
        if n == 0 || n > ts.len() {
            return Err(Error::Config(format!("schedule entry {n} must lie in 1..={}", ts.len())));
        }
    }
    let mut records = Vec::with_capacity(methods.len() * schedule.len() * permutation_seeds.len());
    for &seed in permutation_seeds {
        let permuted = ts.permuted(&random_permutation(ts.len(), seed))?;
        for &n in schedule {
            let sub = permuted.prefix(n)?;
            for &method in methods {
                let sys = match method {
                    Method::ClassicalGs => crate::ortho::classical_gram_schmidt(&sub, cfg)?,
                    Method::ModifiedGs => modified_gram_schmidt(&sub, cfg)?,
                    Method::Householder => crate::ortho::householder_orthonormalize(&sub, cfg)?,
                    Method::Qr => crate::ortho::qr_orthonormalize(&sub, cfg)?,
                    Method::Frame => unreachable!(),
                };
                records.push(EpsRecord { method, n, seed, eps: sys.ortho_error });
            }
        }
    }
    records.sort_by(|a, b| {
        (a.method.label(), a.n, a.seed).cmp(&(b.method.label(), b.n, b.seed))
    });
    Ok(records)
}

fn random_permutation(n: usize, seed: u64) -> Vec<usize> {
    use rand::{Rng, SeedableRng};
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        order.swap(i, j);
    }
    order
}

/// One timing measurement: the median over `reps` runs of the full
/// pipeline (system setup plus solve) at scale `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchRecord {
    pub method: Method,
    pub n: usize,
    /// Output dimension of the instance.
    pub h: usize,
    /// Input dimension of the instance.
    pub k: usize,
    /// Median wall-clock seconds.
    pub seconds: f64,
    pub reps: usize,
}

/// Times the full reconstruction pipeline per method and scale.
///
/// Each cell runs one untimed warm-up followed by `reps` timed runs and
/// records the median; `reps` must be at least 3 for the median to mean
/// anything.
pub fn bench_reconstruction(
    ts: &TrainingSet,
    y: &DVector<f64>,
    methods: &[Method],
    schedule: &[usize],
    reps: usize,
    cfg: &ToleranceConfig,
    regularization: Regularization,
) -> Result<Vec<BenchRecord>> {
    if reps < 3 {
        return Err(Error::Config(format!("need at least 3 repetitions, got {reps}")));
    }
    for &n in schedule {
        if n == 0 || n > ts.len() {
            return Err(Error::Config(format!("schedule entry {n} must lie in 1..={}", ts.len())));
        }
    }
    let mut records = Vec::with_capacity(methods.len() * schedule.len());
    for &n in schedule {
        let sub = ts.prefix(n)?;
        for &method in methods {
            let mut times = Vec::with_capacity(reps);
            for rep in 0..=reps {
                let start = Instant::now();
                let rec = reconstruct_with(method, &sub, y, cfg, regularization)?;
                let dt = start.elapsed().as_secs_f64();
                std::hint::black_box(rec.residual);
                if rep > 0 {
                    times.push(dt);
                }
            }
            times.sort_by(f64::total_cmp);
            let seconds = times[times.len() / 2].max(f64::MIN_POSITIVE);
            records.push(BenchRecord {
                method,
                n,
                h: ts.output_dim(),
                k: ts.input_dim(),
                seconds,
                reps,
            });
        }
    }
    Ok(records)
}

/// Relative l2 error and maximum absolute componentwise error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorMetrics {
    pub rel_l2: f64,
    pub max_abs: f64,
}

/// Compares a reconstruction against a known truth.
///
/// When the truth is zero, the relative error is 0 for a zero
/// reconstruction and infinite otherwise.
pub fn recon_error_metrics(u_n: &DVector<f64>, u_truth: &DVector<f64>) -> Result<ErrorMetrics> {
    if u_n.len() != u_truth.len() {
        return Err(Error::DimensionMismatch { expected: u_truth.len(), got: u_n.len() });
    }
    let diff = u_n - u_truth;
    let max_abs = diff.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let truth_norm = u_truth.norm();
    let rel_l2 = if truth_norm > 0.0 {
        diff.norm() / truth_norm
    } else if diff.norm() == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };
    Ok(ErrorMetrics { rel_l2, max_abs })
}

fn csv_field(s: &str) -> String {
    // The schemas are fixed and comma-free; sanitize free-form labels.
    s.replace([',', '\n', '\r'], ";")
}

fn write_csv(path: &Path, header: &str, rows: impl Iterator<Item = String>) -> Result<()> {
    use std::io::Write;
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    let run = || -> std::io::Result<()> {
        writeln!(w, "{header}")?;
        for row in rows {
            writeln!(w, "{row}")?;
        }
        w.flush()
    };
    run().map_err(|e| Error::io(path, e))
}

/// Writes `method,n,seed,eps_ortho` rows.
pub fn write_eps_csv(path: &Path, records: &[EpsRecord]) -> Result<()> {
    write_csv(
        path,
        "method,n,seed,eps_ortho",
        records.iter().map(|r| format!("{},{},{},{}", r.method, r.n, r.seed, r.eps)),
    )
}

/// Writes `method,n,h,k,seconds,reps` rows.
pub fn write_bench_csv(path: &Path, records: &[BenchRecord]) -> Result<()> {
    write_csv(
        path,
        "method,n,h,k,seconds,reps",
        records
            .iter()
            .map(|r| format!("{},{},{},{},{},{}", r.method, r.n, r.h, r.k, r.seconds, r.reps)),
    )
}

/// Writes `probe,n,pairing` rows.
pub fn write_probe_csv(path: &Path, table: &ProbeTable) -> Result<()> {
    write_csv(
        path,
        "probe,n,pairing",
        table.rows.iter().map(|r| format!("{},{},{}", csv_field(&r.probe), r.n, r.pairing)),
    )
}

/// Writes `kind,i,n,value` rows: the `l1_partial` prefix sums (indexed by
/// their length), the `beta_sq` and `c_sq` tables, and the two observed
/// suprema as `beta_max` / `c_max` rows with `i = n = 0`.
pub fn write_assumption_csv(path: &Path, report: &AssumptionReport) -> Result<()> {
    let l1 = report
        .l1_partial_sums
        .iter()
        .enumerate()
        .map(|(idx, v)| format!("l1_partial,{},{},{}", idx + 1, idx + 1, v));
    let beta = report.beta_rows.iter().map(|r| format!("beta_sq,{},{},{}", r.i, r.n, r.value));
    let c = report.c_rows.iter().map(|r| format!("c_sq,{},{},{}", r.i, r.n, r.value));
    let sups = [
        format!("beta_max,0,0,{}", report.beta_max),
        format!("c_max,0,0,{}", report.c_max),
    ];
    write_csv(path, "kind,i,n,value", l1.chain(beta).chain(c).chain(sups))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use nalgebra::{dmatrix, dvector, DMatrix};

    /// Diagonal desk instance: T = diag(1, 1/2, 1/4) on the standard
    /// basis.
    fn desk3() -> TrainingSet {
        let t = DMatrix::from_diagonal(&dvector![1.0, 0.5, 0.25]);
        TrainingSet::new(DMatrix::identity(3, 3), t).unwrap()
    }

    #[test]
    fn assumption_l1_sums_match_direct_summation_on_orthonormal_inputs() {
        let ts = desk3();
        let u = dvector![1.0, 0.25, 1.0 / 9.0];
        let report = assumption_report(
            &ts,
            &u,
            &[1, 2, 3],
            CoefficientPath::Ortho,
            Regularization::None,
        )
        .unwrap();
        let direct: Vec<f64> = vec![1.0, 1.25, 1.25 + 1.0 / 9.0];
        for (got, want) in report.l1_partial_sums.iter().zip(&direct) {
            assert_relative_eq!(got, want, epsilon = 1e-14);
        }
    }

    #[test]
    fn assumption_betas_vanish_for_orthogonal_images() {
        let ts = desk3();
        let u = dvector![1.0, 0.25, 1.0 / 9.0];
        let report = assumption_report(
            &ts,
            &u,
            &[1, 2, 3],
            CoefficientPath::Ortho,
            Regularization::None,
        )
        .unwrap();
        // Rows: n=1 gives i in {2,3}; n=2 gives i=3; n=3 none.
        assert_eq!(report.beta_rows.len(), 3);
        for row in &report.beta_rows {
            assert!(row.i > row.n);
            assert!(row.value.abs() <= 1e-12, "beta({}, {}) = {}", row.i, row.n, row.value);
        }
        assert!(report.beta_max <= 1e-12);
        // c rows exist for every (i, n) pair.
        assert_eq!(report.c_rows.len(), 9);
        assert!(report.c_max >= 1.0 - 1e-12);
    }

    #[test]
    fn assumption_frame_path_matches_ortho_path_on_orthonormal_inputs() {
        // With orthonormal inputs the dual coefficients equal the plain
        // inner products.
        let ts = desk3();
        let u = dvector![0.3, -0.2, 0.9];
        let a = assumption_report(&ts, &u, &[3], CoefficientPath::Ortho, Regularization::None)
            .unwrap();
        let b = assumption_report(&ts, &u, &[3], CoefficientPath::Frame, Regularization::None)
            .unwrap();
        for (x, y) in a.l1_partial_sums.iter().zip(&b.l1_partial_sums) {
            assert_relative_eq!(x, y, epsilon = 1e-12);
        }
    }

    #[test]
    fn assumption_report_validates_schedule_and_dims() {
        let ts = desk3();
        let u = dvector![1.0, 1.0, 1.0];
        assert!(assumption_report(&ts, &u, &[4], CoefficientPath::Ortho, Regularization::None)
            .is_err());
        assert!(assumption_report(&ts, &u, &[0], CoefficientPath::Ortho, Regularization::None)
            .is_err());
        let short = dvector![1.0];
        assert!(assumption_report(&ts, &short, &[1], CoefficientPath::Ortho, Regularization::None)
            .is_err());
    }

    #[test]
    fn probe_table_reports_pairings_and_trends() {
        let u_dagger = dvector![1.0, 1.0];
        let recs = vec![
            (1usize, dvector![0.0, 0.0]),
            (2usize, dvector![1.0, 0.0]),
            (3usize, dvector![1.0, 1.0]),
        ];
        let probes = vec![
            ("truth".to_string(), dvector![1.0, 1.0]),
            ("e2, with comma".to_string(), dvector![0.0, 1.0]),
        ];
        let table = weak_convergence_probe(&recs, &u_dagger, &probes).unwrap();
        assert_eq!(table.rows.len(), 6);
        // Pairings against the truth direction: 2, 1, 0.
        let truth: Vec<f64> =
            table.rows.iter().filter(|r| r.probe == "truth").map(|r| r.pairing).collect();
        assert_relative_eq!(truth[0], 2.0);
        assert_relative_eq!(truth[1], 1.0);
        assert_relative_eq!(truth[2], 0.0);
        assert_eq!(table.trends[0], ("truth".to_string(), 1.0));
        // Second probe: 1, 1, 0 -> one decreasing step of two.
        assert_relative_eq!(table.trends[1].1, 0.5);
    }

    #[test]
    fn probe_dimension_mismatches_are_rejected() {
        let u = dvector![1.0, 2.0];
        let bad_rec = vec![(1usize, dvector![1.0])];
        assert!(weak_convergence_probe(&bad_rec, &u, &[]).is_err());
        let recs = vec![(1usize, dvector![1.0, 1.0])];
        let bad_probe = vec![("p".to_string(), dvector![1.0])];
        assert!(weak_convergence_probe(&recs, &u, &bad_probe).is_err());
    }

    #[test]
    fn eps_curve_produces_full_grid_and_rejects_frame() {
        let ts = desk3();
        let records = ortho_error_curve(
            &ts,
            &[Method::ClassicalGs, Method::Qr],
            &[1, 2, 3],
            &[0, 1],
            &ToleranceConfig::default(),
        )
        .unwrap();
        assert_eq!(records.len(), 12);
        for r in &records {
            assert!(r.eps.is_finite());
            assert!(r.eps < 1e-12, "orthogonal family must stay clean, got {}", r.eps);
        }
        assert!(ortho_error_curve(
            &ts,
            &[Method::Frame],
            &[1],
            &[0],
            &ToleranceConfig::default()
        )
        .is_err());
    }

    #[test]
    fn bench_produces_one_record_per_cell() {
        let ts = desk3();
        let y = dvector![1.0, 0.5, 0.0];
        let records = bench_reconstruction(
            &ts,
            &y,
            &[Method::Qr, Method::Frame],
            &[2, 3],
            3,
            &ToleranceConfig::default(),
            Regularization::None,
        )
        .unwrap();
        assert_eq!(records.len(), 4);
        for r in &records {
            assert!(r.seconds > 0.0);
            assert_eq!(r.reps, 3);
            assert_eq!(r.h, 3);
            assert_eq!(r.k, 3);
        }
        assert!(bench_reconstruction(
            &ts,
            &y,
            &[Method::Qr],
            &[1],
            2,
            &ToleranceConfig::default(),
            Regularization::None
        )
        .is_err());
    }

    #[test]
    fn error_metrics_handle_zero_truth() {
        let m = recon_error_metrics(&dvector![1.0, 1.0], &dvector![1.0, 0.0]).unwrap();
        assert_relative_eq!(m.rel_l2, 1.0);
        assert_relative_eq!(m.max_abs, 1.0);
        let z = recon_error_metrics(&dvector![0.0], &dvector![0.0]).unwrap();
        assert_eq!(z.rel_l2, 0.0);
        let inf = recon_error_metrics(&dvector![1.0], &dvector![0.0]).unwrap();
        assert!(inf.rel_l2.is_infinite());
        assert!(recon_error_metrics(&dvector![1.0], &dvector![1.0, 2.0]).is_err());
    }

    #[test]
    fn csv_emitters_write_fixed_headers() {
        let dir = tempfile::tempdir().unwrap();
        let eps = dir.path().join("eps.csv");
        write_eps_csv(&eps, &[EpsRecord { method: Method::Qr, n: 5, seed: 1, eps: 1e-15 }])
            .unwrap();
        let text = std::fs::read_to_string(&eps).unwrap();
        assert!(text.starts_with("method,n,seed,eps_ortho\n"));
        assert!(text.contains("qr,5,1,"));

        let bench = dir.path().join("bench.csv");
        write_bench_csv(
            &bench,
            &[BenchRecord { method: Method::Frame, n: 9, h: 4, k: 2, seconds: 0.5, reps: 5 }],
        )
        .unwrap();
        let text = std::fs::read_to_string(&bench).unwrap();
        assert!(text.starts_with("method,n,h,k,seconds,reps\n"));
        assert!(text.contains("frame,9,4,2,0.5,5"));

        let probes = dir.path().join("probes.csv");
        let table = ProbeTable {
            rows: vec![ProbeRow { probe: "a,b".into(), n: 1, pairing: 0.25 }],
            trends: vec![],
        };
        write_probe_csv(&probes, &table).unwrap();
        let text = std::fs::read_to_string(&probes).unwrap();
        assert!(text.starts_with("probe,n,pairing\n"));
        assert!(text.contains("a;b,1,0.25"));

        let assumption = dir.path().join("assumption.csv");
        let report = AssumptionReport {
            l1_partial_sums: vec![1.0, 1.5],
            beta_rows: vec![AssumptionRow { i: 2, n: 1, value: 0.0 }],
            beta_max: 0.0,
            c_rows: vec![AssumptionRow { i: 1, n: 1, value: 1.0 }],
            c_max: 1.0,
        };
        write_assumption_csv(&assumption, &report).unwrap();
        let text = std::fs::read_to_string(&assumption).unwrap();
        assert!(text.starts_with("kind,i,n,value\n"));
        assert!(text.contains("l1_partial,2,2,1.5"));
        assert!(text.contains("beta_sq,2,1,0"));
        assert!(text.contains("c_max,0,0,1"));
    }

    #[test]
    fn mirror_orthonormalization_never_applies_an_operator() {
        // Correlated inputs with a known operator: the carried images must
        // equal T applied to the orthonormalized inputs, even though the
        // report never saw T.
        let t = dmatrix![1.0, 2.0; 0.0, 1.0; 1.0, 0.0];
        let inputs = dmatrix![1.0, 0.9; 0.1, 0.2];
        let ts = TrainingSet::new(inputs.clone(), &t * &inputs).unwrap();
        let swapped = ts.swapped().unwrap();
        let mirror = modified_gram_schmidt(&swapped, &ToleranceConfig::default()).unwrap();
        assert_relative_eq!(&t * &mirror.ortho_outputs, mirror.preimages, epsilon = 1e-12);
    }
}
