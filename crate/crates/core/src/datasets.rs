//! Image corpora: loading directories of PGM files, generating synthetic
//! families, and splitting into train/test parts.
//!
//! Generated corpora come with a guarantee the reconstruction paths rely
//! on: the flattened images are pairwise linearly independent at the
//! dependence tolerance the orthonormalization backends use.  The
//! generators certify this by checking the spectrum of the stacked Gram
//! matrix and regenerating the batch under a salted seed in the
//! (practically unobserved) case of a failure.

use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::operators::flatten_row_major;
use crate::pgm;

/// The synthetic image families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SyntheticKind {
    /// Sums of a few random Gaussian bumps.
    Blobs,
    /// Stroke images loosely resembling handwritten digits.
    Digitslike,
    /// Band-limited random fields with decaying cosine spectra.
    SmoothRandom,
}

impl SyntheticKind {
    pub const ALL: [SyntheticKind; 3] =
        [SyntheticKind::Blobs, SyntheticKind::Digitslike, SyntheticKind::SmoothRandom];

    pub fn label(self) -> &'static str {
        match self {
            SyntheticKind::Blobs => "blobs",
            SyntheticKind::Digitslike => "digitslike",
            SyntheticKind::SmoothRandom => "smoothrandom",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "blobs" => Ok(SyntheticKind::Blobs),
            "digitslike" => Ok(SyntheticKind::Digitslike),
            "smoothrandom" => Ok(SyntheticKind::SmoothRandom),
            other => Err(Error::Config(format!(
                "unknown synthetic kind {other:?}; expected blobs, digitslike, or smoothrandom"
            ))),
        }
    }
}

impl std::fmt::Display for SyntheticKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Where a corpus came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CorpusSource {
    Directory(PathBuf),
    Synthetic { kind: SyntheticKind, seed: u64 },
}

/// One image with a stable identifier.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusItem {
    pub id: String,
    /// Square image, intensities in `[0, 1]`.
    pub image: DMatrix<f64>,
}

/// An ordered collection of equally sized square images.
#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    pub side: usize,
    pub items: Vec<CorpusItem>,
    pub source: CorpusSource,
}

impl Corpus {
    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Stacks the row-major flattened images as columns of a
    /// `side² x len` matrix, the input half of a training set.
    pub fn input_matrix(&self) -> DMatrix<f64> {
        let k = self.side * self.side;
        let mut m = DMatrix::zeros(k, self.len());
        for (j, item) in self.items.iter().enumerate() {
            m.set_column(j, &flatten_row_major(&item.image));
        }
        m
    }
}

/// A file skipped while loading a corpus, with the reason.
#[derive(Debug, Clone)]
pub struct SkipReport {
    pub path: PathBuf,
    pub reason: String,
}

/// How to divide a corpus into train and test parts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitSpec {
    pub train_count: usize,
    pub test_count: usize,
    /// When set, items are shuffled by this seed before the split;
    /// otherwise file order is kept.
    pub shuffle_seed: Option<u64>,
}

/// Loads every `*.pgm` file in `dir` (sorted by file name) whose image is
/// square with the expected side.
///
/// Files that fail to parse or have the wrong size are skipped and
/// reported, not fatal.  Fails with [`Error::EmptyCorpus`] when nothing
/// loads.
pub fn load_corpus(dir: &Path, expected_side: usize) -> Result<(Corpus, Vec<SkipReport>)> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| {
            p.extension()
                .and_then(|e| e.to_str())
                .is_some_and(|e| e.eq_ignore_ascii_case("pgm"))
        })
        .collect();
    paths.sort();

    let mut items = Vec::new();
    let mut skipped = Vec::new();
    for path in paths {
        match pgm::read_pgm(&path) {
            Ok(image) => {
                if image.nrows() == expected_side && image.ncols() == expected_side {
                    let id = path
                        .file_stem()
                        .map(|s| s.to_string_lossy().into_owned())
                        .unwrap_or_else(|| "unnamed".into());
                    items.push(CorpusItem { id, image });
                } else {
                    skipped.push(SkipReport {
                        path,
                        reason: format!(
                            "image is {}x{}, expected {expected_side}x{expected_side}",
                            image.nrows(),
                            image.ncols()
                        ),
                    });
                }
            }
            Err(e) => skipped.push(SkipReport { path, reason: e.to_string() }),
        }
    }
    if items.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    Ok((
        Corpus { side: expected_side, items, source: CorpusSource::Directory(dir.to_owned()) },
        skipped,
    ))
}

/// Generates `count` synthetic images of the given kind, deterministically
/// from `seed`.
///
/// The flattened images are certified pairwise linearly independent (see
/// the module docs), which also caps `count` at `side * side`.
///
/// # Panics
///
/// When `count` is zero or exceeds `side * side`.
pub fn gen_synthetic(kind: SyntheticKind, side: usize, count: usize, seed: u64) -> Corpus {
    assert!(count >= 1, "need at least one image");
    assert!(
        count <= side * side,
        "cannot generate {count} independent images with only {} pixels",
        side * side
    );
    for attempt in 0u64..64 {
        let salted = seed.wrapping_add(attempt.wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let mut rng = ChaCha8Rng::seed_from_u64(salted);
        let images: Vec<DMatrix<f64>> =
            (0..count).map(|_| gen_one(kind, side, &mut rng)).collect();
        let mut stack = DMatrix::zeros(side * side, count);
        for (j, img) in images.iter().enumerate() {
            stack.set_column(j, &flatten_row_major(img));
        }
        if stack_is_independent(&stack) {
            let items = images
                .into_iter()
                .enumerate()
                .map(|(i, image)| CorpusItem { id: format!("{kind}_{i:05}"), image })
                .collect();
            return Corpus { side, items, source: CorpusSource::Synthetic { kind, seed } };
        }
    }
    unreachable!("synthetic generator failed to produce an independent family");
}

/// Conservative independence certificate: all eigenvalues of the stacked
/// Gram matrix clear a floor far above the dependence tolerance's square.
fn stack_is_independent(stack: &DMatrix<f64>) -> bool {
    let n = stack.ncols();
    if n > stack.nrows() {
        return false;
    }
    if n == 1 {
        return stack.column(0).norm() > 0.0;
    }
    let gram = stack.tr_mul(stack);
    let eig = gram.symmetric_eigen();
    let lam_max = eig.eigenvalues.iter().cloned().fold(0.0f64, f64::max);
    lam_max > 0.0 && eig.eigenvalues.iter().all(|&l| l > 1e-14 * lam_max)
}

fn gen_one(kind: SyntheticKind, side: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    match kind {
        SyntheticKind::Blobs => gen_blobs(side, rng),
        SyntheticKind::Digitslike => gen_digitslike(side, rng),
        SyntheticKind::SmoothRandom => gen_smooth_random(side, rng),
    }
}

fn gen_blobs(side: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let s = side as f64;
    let nblobs = rng.random_range(3..=6);
    let blobs: Vec<(f64, f64, f64, f64)> = (0..nblobs)
        .map(|_| {
            (
                rng.random_range(0.15 * s..0.85 * s),
                rng.random_range(0.15 * s..0.85 * s),
                rng.random_range(0.08 * s..0.25 * s),
                rng.random_range(0.3..1.0),
            )
        })
        .collect();
    let mut field = DMatrix::from_fn(side, side, |r, x| {
        let (xf, rf) = (x as f64, r as f64);
        blobs
            .iter()
            .map(|&(cx, cy, sigma, amp)| {
                let d2 = (xf - cx).powi(2) + (rf - cy).powi(2);
                amp * (-d2 / (2.0 * sigma * sigma)).exp()
            })
            .sum()
    });
    add_noise(&mut field, 1e-3, rng);
    normalize_unit(&mut field);
    field
}

fn gen_digitslike(side: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let s = side as f64;
    let width = (s / 12.0).max(0.6);
    let mut field = DMatrix::zeros(side, side);
    let nstrokes = rng.random_range(2..=4);
    for _ in 0..nstrokes {
        // Quadratic Bezier stroke through three random points, stamped as
        // Gaussian splats along the curve.
        let p: Vec<(f64, f64)> = (0..3)
            .map(|_| (rng.random_range(0.1 * s..0.9 * s), rng.random_range(0.1 * s..0.9 * s)))
            .collect();
        let amp = rng.random_range(0.6..1.0);
        let samples = 4 * side;
        for step in 0..=samples {
            let t = step as f64 / samples as f64;
            let omt = 1.0 - t;
            let cx = omt * omt * p[0].0 + 2.0 * omt * t * p[1].0 + t * t * p[2].0;
            let cy = omt * omt * p[0].1 + 2.0 * omt * t * p[1].1 + t * t * p[2].1;
            stamp_gaussian(&mut field, cx, cy, width, amp);
        }
    }
    add_noise(&mut field, 1e-3, rng);
    normalize_unit(&mut field);
    field
}

/// Blends a Gaussian bump into `field` by maximum, touching only pixels
/// within three widths of the center.
fn stamp_gaussian(field: &mut DMatrix<f64>, cx: f64, cy: f64, width: f64, amp: f64) {
    let side = field.nrows();
    let reach = (3.0 * width).ceil() as isize;
    let (cxi, cyi) = (cx.round() as isize, cy.round() as isize);
    for r in (cyi - reach).max(0)..=(cyi + reach).min(side as isize - 1) {
        for x in (cxi - reach).max(0)..=(cxi + reach).min(side as isize - 1) {
            let d2 = (x as f64 - cx).powi(2) + (r as f64 - cy).powi(2);
            let v = amp * (-d2 / (2.0 * width * width)).exp();
            let cell = &mut field[(r as usize, x as usize)];
            if v > *cell {
                *cell = v;
            }
        }
    }
}

fn gen_smooth_random(side: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    // Coefficients on a full cosine basis with polynomial decay; the full
    // band keeps distinct draws independent, the decay keeps them smooth.
    let coeffs = DMatrix::from_fn(side, side, |p, q| {
        let decay = 1.0 / (1.0 + (p * p + q * q) as f64);
        let g: f64 = StandardNormal.sample(rng);
        g * decay
    });
    let basis = DMatrix::from_fn(side, side, |x, p| {
        (std::f64::consts::PI * p as f64 * (2.0 * x as f64 + 1.0) / (2.0 * side as f64)).cos()
    });
    let mut field = &basis * coeffs * basis.transpose();
    normalize_unit(&mut field);
    field
}

fn add_noise(field: &mut DMatrix<f64>, scale: f64, rng: &mut ChaCha8Rng) {
    for v in field.iter_mut() {
        *v += scale * rng.random::<f64>();
    }
}

/// Affinely rescales to span exactly `[0, 1]`.
fn normalize_unit(field: &mut DMatrix<f64>) {
    let min = field.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = field.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let range = (max - min).max(1e-12);
    for v in field.iter_mut() {
        *v = (*v - min) / range;
    }
}

/// Splits a corpus into disjoint train and test parts, optionally
/// shuffling first.
pub fn split(corpus: &Corpus, spec: &SplitSpec) -> Result<(Corpus, Corpus)> {
    let n = corpus.len();
    let requested = spec.train_count + spec.test_count;
    if requested > n {
        return Err(Error::InsufficientItems { available: n, requested });
    }
    if spec.train_count == 0 {
        return Err(Error::Config("train split must keep at least one item".into()));
    }
    let mut order: Vec<usize> = (0..n).collect();
    if let Some(seed) = spec.shuffle_seed {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for i in (1..n).rev() {
            let j = rng.random_range(0..=i);
            order.swap(i, j);
        }
    }
    let pick = |range: std::ops::Range<usize>| Corpus {
        side: corpus.side,
        items: range.map(|i| corpus.items[order[i]].clone()).collect(),
        source: corpus.source.clone(),
    };
    let train = pick(0..spec.train_count);
    let test = pick(spec.train_count..requested);
    Ok((train, test))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generation_is_deterministic_in_the_seed() {
        for kind in SyntheticKind::ALL {
            let a = gen_synthetic(kind, 12, 5, 42);
            let b = gen_synthetic(kind, 12, 5, 42);
            assert_eq!(a, b, "{kind}");
            let c = gen_synthetic(kind, 12, 5, 43);
            assert_ne!(a.items[0].image, c.items[0].image, "{kind}");
        }
    }

    #[test]
    fn generated_images_are_unit_range_and_independent() {
        for kind in SyntheticKind::ALL {
            let corpus = gen_synthetic(kind, 10, 8, 7);
            assert_eq!(corpus.len(), 8);
            for item in &corpus.items {
                assert_eq!(item.image.nrows(), 10);
                let min = item.image.iter().cloned().fold(f64::INFINITY, f64::min);
                let max = item.image.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                assert!(min >= 0.0 && max <= 1.0, "{kind}: range [{min}, {max}]");
            }
            assert!(stack_is_independent(&corpus.input_matrix()), "{kind}");
        }
    }

    #[test]
    #[should_panic(expected = "independent images")]
    fn more_images_than_pixels_is_refused() {
        gen_synthetic(SyntheticKind::Blobs, 3, 10, 0);
    }

    #[test]
    fn input_matrix_flattens_row_major() {
        let image = nalgebra::dmatrix![0.1, 0.2; 0.3, 0.4];
        let corpus = Corpus {
            side: 2,
            items: vec![CorpusItem { id: "x".into(), image }],
            source: CorpusSource::Synthetic { kind: SyntheticKind::Blobs, seed: 0 },
        };
        let m = corpus.input_matrix();
        assert_eq!(m.column(0).as_slice(), &[0.1, 0.2, 0.3, 0.4]);
    }

    #[test]
    fn load_corpus_skips_bad_files_and_sorts() {
        let dir = tempfile::tempdir().unwrap();
        let img = DMatrix::from_element(4, 4, 0.5);
        pgm::write_pgm(&dir.path().join("b.pgm"), &img).unwrap();
        pgm::write_pgm(&dir.path().join("a.pgm"), &img).unwrap();
        pgm::write_pgm(&dir.path().join("wrong.pgm"), &DMatrix::from_element(5, 5, 0.5)).unwrap();
        std::fs::write(dir.path().join("junk.pgm"), b"not an image").unwrap();
        std::fs::write(dir.path().join("notes.txt"), b"ignored entirely").unwrap();

        let (corpus, skipped) = load_corpus(dir.path(), 4).unwrap();
        let ids: Vec<&str> = corpus.items.iter().map(|i| i.id.as_str()).collect();
        assert_eq!(ids, vec!["a", "b"]);
        assert_eq!(skipped.len(), 2);
        assert!(skipped.iter().any(|s| s.path.ends_with("wrong.pgm")));
        assert!(skipped.iter().any(|s| s.path.ends_with("junk.pgm")));
    }

    #[test]
    fn load_corpus_empty_directory_fails() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(load_corpus(dir.path(), 4), Err(Error::EmptyCorpus)));
        // A directory with only unusable files is as empty.
        std::fs::write(dir.path().join("junk.pgm"), b"nope").unwrap();
        assert!(matches!(load_corpus(dir.path(), 4), Err(Error::EmptyCorpus)));
    }

    #[test]
    fn split_is_deterministic_and_disjoint() {
        let corpus = gen_synthetic(SyntheticKind::Blobs, 8, 10, 1);
        let spec = SplitSpec { train_count: 7, test_count: 3, shuffle_seed: Some(99) };
        let (tr1, te1) = split(&corpus, &spec).unwrap();
        let (tr2, te2) = split(&corpus, &spec).unwrap();
        assert_eq!(tr1, tr2);
        assert_eq!(te1, te2);
        assert_eq!(tr1.len(), 7);
        assert_eq!(te1.len(), 3);
        for t in &te1.items {
            assert!(!tr1.items.iter().any(|i| i.id == t.id), "overlap at {}", t.id);
        }
        // Unseeded split keeps file order.
        let spec = SplitSpec { train_count: 2, test_count: 1, shuffle_seed: None };
        let (tr, te) = split(&corpus, &spec).unwrap();
        assert_eq!(tr.items[0].id, corpus.items[0].id);
        assert_eq!(te.items[0].id, corpus.items[2].id);
    }

    #[test]
    fn split_rejects_oversubscription() {
        let corpus = gen_synthetic(SyntheticKind::Blobs, 8, 5, 1);
        let spec = SplitSpec { train_count: 4, test_count: 2, shuffle_seed: None };
        assert!(matches!(
            split(&corpus, &spec),
            Err(Error::InsufficientItems { available: 5, requested: 6 })
        ));
    }
}
