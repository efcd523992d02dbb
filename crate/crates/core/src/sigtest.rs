//! Nonparametric significance tests over per-query scores: the Friedman
//! two-way analysis of variance by ranks for k techniques, and the Wilcoxon
//! matched-pairs signed-rank test for pairwise comparisons against a baseline.

use std::cmp::Ordering;

use statrs::function::{erf, gamma};

use crate::error::{Error, Result};
use crate::real::Real;

/// Reporting threshold for significance; raw p-values are always kept.
pub const ALPHA: f64 = 0.05;

/// Largest number of nonzero differences for which the Wilcoxon p-value is
/// computed exactly.
pub const WILCOXON_EXACT_MAX: usize = 20;

/// Upper tail `P(X >= x)` of a chi-square variable with `df` degrees of freedom.
pub fn chi_square_upper_tail<R: Real>(x: R, df: u32) -> Result<R> {
    if x.is_nan() || x < R::zero() {
        return Err(Error::Input(format!("chi-square statistic must be >= 0, got {x}")));
    }
    if df == 0 {
        return Err(Error::Input("chi-square needs at least one degree of freedom".into()));
    }
    if x == R::zero() {
        return Ok(R::one());
    }
    let q = gamma::checked_gamma_ur(f64::from(df) / 2.0, x.as_f64() / 2.0)
        .map_err(|e| Error::Input(format!("chi-square tail: {e}")))?;
    Ok(R::lit(q))
}

/// Subjects (rows, e.g. queries) by treatments (columns, e.g. techniques).
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreMatrix<R> {
    labels: Vec<String>,
    rows: Vec<Vec<R>>,
}

impl<R: Real> ScoreMatrix<R> {
    pub fn new(labels: Vec<String>, rows: Vec<Vec<R>>) -> Result<Self> {
        let k = labels.len();
        if k < 2 {
            return Err(Error::Input(format!("need at least 2 treatments, got {k}")));
        }
        if rows.len() < 2 {
            return Err(Error::Input(format!("need at least 2 subjects, got {}", rows.len())));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != k {
                return Err(Error::Input(format!("row {i} has {} cells, expected {k}", row.len())));
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::Input(format!("row {i} has a non-finite value")));
            }
        }
        Ok(Self { labels, rows })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn rows(&self) -> &[Vec<R>] {
        &self.rows
    }

    pub fn num_subjects(&self) -> usize {
        self.rows.len()
    }

    pub fn num_treatments(&self) -> usize {
        self.labels.len()
    }

    pub fn column(&self, j: usize) -> Vec<R> {
        self.rows.iter().map(|r| r[j]).collect()
    }

    pub fn column_mean(&self, j: usize) -> R {
        self.rows.iter().map(|r| r[j]).sum::<R>() / R::from_count(self.rows.len() as u64)
    }
}

/// Ascending ranks with ties sharing their average rank, plus the tie term
/// `Σ (t³ - t)` over tie groups.
pub fn average_ranks<R: Real>(values: &[R]) -> (Vec<R>, R) {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap_or(Ordering::Equal));
    let mut ranks = vec![R::zero(); values.len()];
    let mut ties = R::zero();
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && values[order[j]] == values[order[i]] {
            j += 1;
        }
        // positions i..j (0-based) share rank ((i+1) + j) / 2
        let avg = R::from_count((i + 1 + j) as u64) / R::lit(2.0);
        for &idx in &order[i..j] {
            ranks[idx] = avg;
        }
        let t = R::from_count((j - i) as u64);
        ties = ties + t * t * t - t;
        i = j;
    }
    (ranks, ties)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FriedmanResult<R> {
    pub chi2: R,
    pub df: u32,
    pub p_value: R,
    /// Mean within-subject rank per treatment; higher means larger scores.
    pub mean_ranks: Vec<R>,
    pub num_subjects: usize,
}

impl<R: Real> FriedmanResult<R> {
    pub fn significant(&self) -> bool {
        self.p_value.as_f64() < ALPHA
    }
}

/// The Friedman statistic from mean ranks:
/// `12n / (k(k+1)) · Σ (R̄_j - (k+1)/2)²`.
///
/// For exact rank data this equals `12/(nk(k+1)) Σ R_j² - 3n(k+1)`; the
/// centered form stays meaningful for mean ranks that were rounded
/// and no longer sum to `k(k+1)/2`. No tie correction is applied.
pub fn friedman_from_mean_ranks<R: Real>(mean_ranks: &[R], n: usize) -> Result<FriedmanResult<R>> {
    let k = mean_ranks.len();
    if k < 2 || n < 2 {
        return Err(Error::Input("need at least 2 treatments and 2 subjects".into()));
    }
    let chi2 = centered_statistic(mean_ranks, n);
    let df = (k - 1) as u32;
    Ok(FriedmanResult {
        chi2,
        df,
        p_value: chi_square_upper_tail(chi2, df)?,
        mean_ranks: mean_ranks.to_vec(),
        num_subjects: n,
    })
}

fn centered_statistic<R: Real>(mean_ranks: &[R], n: usize) -> R {
    let k = R::from_count(mean_ranks.len() as u64);
    let center = (k + R::one()) / R::lit(2.0);
    let spread: R = mean_ranks.iter().map(|&m| (m - center) * (m - center)).sum();
    R::lit(12.0) * R::from_count(n as u64) / (k * (k + R::one())) * spread
}

/// Friedman test with the tie correction `1 - Σ(t³-t) / (n k (k²-1))`.
/// When every row is fully tied the statistic is 0 and p is 1.
pub fn friedman<R: Real>(m: &ScoreMatrix<R>) -> Result<FriedmanResult<R>> {
    let n = m.num_subjects();
    let k = m.num_treatments();
    let mut rank_sums = vec![R::zero(); k];
    let mut ties = R::zero();
    for row in m.rows() {
        let (ranks, t) = average_ranks(row);
        for (sum, r) in rank_sums.iter_mut().zip(ranks) {
            *sum = *sum + r;
        }
        ties = ties + t;
    }
    let nr = R::from_count(n as u64);
    let kr = R::from_count(k as u64);
    let mean_ranks: Vec<R> = rank_sums.iter().map(|&s| s / nr).collect();
    let correction = R::one() - ties / (nr * kr * (kr * kr - R::one()));
    let df = (k - 1) as u32;
    let eps = R::lit(1e-12);
    if correction <= eps {
        return Ok(FriedmanResult {
            chi2: R::zero(),
            df,
            p_value: R::one(),
            mean_ranks,
            num_subjects: n,
        });
    }
    let chi2 = (centered_statistic(&mean_ranks, n) / correction).max(R::zero());
    Ok(FriedmanResult {
        chi2,
        df,
        p_value: chi_square_upper_tail(chi2, df)?,
        mean_ranks,
        num_subjects: n,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PValueMethod {
    /// Exact when at most [`WILCOXON_EXACT_MAX`] differences are nonzero.
    Auto,
    Exact,
    /// Normal approximation with tie-corrected variance and continuity correction.
    Normal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WilcoxonResult<R> {
    /// Pairs with a nonzero difference.
    pub n_used: usize,
    pub w_plus: R,
    pub w_minus: R,
    /// `min(w_plus, w_minus)`.
    pub statistic: R,
    /// Two-sided.
    pub p_value: R,
    pub exact: bool,
    /// Pairs with `a > b`.
    pub better: usize,
    /// Pairs with `a < b`.
    pub worse: usize,
    pub tied: usize,
}

impl<R: Real> WilcoxonResult<R> {
    pub fn significant(&self) -> bool {
        self.p_value.as_f64() < ALPHA
    }
}

/// Wilcoxon matched-pairs signed-rank test of `a` against `b`.
pub fn wilcoxon_signed_rank<R: Real>(a: &[R], b: &[R]) -> Result<WilcoxonResult<R>> {
    wilcoxon_signed_rank_with(a, b, PValueMethod::Auto)
}

pub fn wilcoxon_signed_rank_with<R: Real>(a: &[R], b: &[R], method: PValueMethod) -> Result<WilcoxonResult<R>> {
    if a.len() != b.len() {
        return Err(Error::Input(format!(
            "paired samples differ in length: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    if a.is_empty() {
        return Err(Error::Input("paired samples are empty".into()));
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(Error::Input("paired samples contain non-finite values".into()));
    }
    let diffs: Vec<R> = a
        .iter()
        .zip(b)
        .map(|(&x, &y)| x - y)
        .filter(|d| *d != R::zero())
        .collect();
    let better = diffs.iter().filter(|d| **d > R::zero()).count();
    let worse = diffs.len() - better;
    let tied = a.len() - diffs.len();
    let n = diffs.len();
    if n == 0 {
        return Ok(WilcoxonResult {
            n_used: 0,
            w_plus: R::zero(),
            w_minus: R::zero(),
            statistic: R::zero(),
            p_value: R::one(),
            exact: true,
            better,
            worse,
            tied,
        });
    }

    let magnitudes: Vec<R> = diffs.iter().map(|d| d.abs()).collect();
    let (ranks, ties) = average_ranks(&magnitudes);
    let w_plus: R = ranks
        .iter()
        .zip(&diffs)
        .filter(|(_, d)| **d > R::zero())
        .map(|(r, _)| *r)
        .sum();
    let total = R::from_count((n * (n + 1) / 2) as u64);
    let w_minus = total - w_plus;

    let exact = match method {
        PValueMethod::Auto => n <= WILCOXON_EXACT_MAX,
        PValueMethod::Exact => true,
        PValueMethod::Normal => false,
    };
    let p_value = if exact {
        // Average ranks are multiples of 1/2; doubling makes them integers.
        let doubled: Vec<usize> = ranks.iter().map(|r| (r.as_f64() * 2.0).round() as usize).collect();
        let w2 = (w_plus.as_f64() * 2.0).round() as usize;
        R::lit(exact_two_sided(&doubled, w2))
    } else {
        normal_two_sided(n, w_plus, ties)
    };

    Ok(WilcoxonResult {
        n_used: n,
        w_plus,
        w_minus,
        statistic: w_plus.min(w_minus),
        p_value,
        exact,
        better,
        worse,
        tied,
    })
}

/// `min(1, 2 · P(W⁺ <= min(w, total - w)))` under the sign-flip null, counted
/// over all `2^n` sign patterns by subset-sum dynamic programming.
fn exact_two_sided(doubled_ranks: &[usize], doubled_w_plus: usize) -> f64 {
    let total: usize = doubled_ranks.iter().sum();
    let lower = doubled_w_plus.min(total - doubled_w_plus);
    let mut counts = vec![0f64; total + 1];
    counts[0] = 1.0;
    let mut reach = 0;
    for &r in doubled_ranks {
        for s in (0..=reach).rev() {
            if counts[s] != 0.0 {
                counts[s + r] += counts[s];
            }
        }
        reach += r;
    }
    let tail: f64 = counts[..=lower].iter().sum();
    let patterns = 2f64.powi(doubled_ranks.len() as i32);
    (2.0 * tail / patterns).min(1.0)
}

fn normal_two_sided<R: Real>(n: usize, w_plus: R, ties: R) -> R {
    let nr = R::from_count(n as u64);
    let mean = nr * (nr + R::one()) / R::lit(4.0);
    let var = nr * (nr + R::one()) * (R::lit(2.0) * nr + R::one()) / R::lit(24.0) - ties / R::lit(48.0);
    if var <= R::zero() {
        return R::one();
    }
    let z = ((w_plus - mean).abs() - R::lit(0.5)).max(R::zero()) / var.sqrt();
    R::lit(erf::erfc(z.as_f64() / std::f64::consts::SQRT_2))
}
