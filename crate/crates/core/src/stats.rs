//! Contingency-table and rank statistics for the downstream analyses:
//! prevalence, odds ratios with normal-approximation CIs on the log scale,
//! chi-square with Yates' continuity correction, the two-sided asymptotic
//! Mann–Whitney U test with tie correction, Pearson correlation for the
//! length-bias diagnostic, and keyword group means for the familial-role
//! diagnostic.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::foundation::{Foundation, FoundationScores};
use crate::math::{chi_square_sf_1df, normal_cdf};
// Inherent std float methods shadow this trait under cfg(test).
#[cfg_attr(test, allow(unused_imports))]
use crate::math::FloatExt;
use crate::text::TokenizedDoc;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StatsError {
    /// A zero cell makes the odds ratio undefined; rerun with the
    /// Haldane–Anscombe correction if appropriate.
    ZeroCell,
    /// A zero row or column margin.
    ZeroMargin,
    EmptySample,
    /// No variance in the inputs (all values tied).
    DegenerateVariance,
    EmptyGroup(String),
}

impl fmt::Display for StatsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StatsError::ZeroCell => f.write_str("contingency table has a zero cell"),
            StatsError::ZeroMargin => f.write_str("contingency table has a zero margin"),
            StatsError::EmptySample => f.write_str("empty sample"),
            StatsError::DegenerateVariance => f.write_str("inputs have zero variance"),
            StatsError::EmptyGroup(name) => write!(f, "empty group {name:?}"),
        }
    }
}

impl core::error::Error for StatsError {}

/// A 2×2 contingency table. Cell `n11` counts (exposed, positive),
/// `n10` (exposed, negative), `n01` (unexposed, positive),
/// `n00` (unexposed, negative).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Contingency2x2 {
    pub n11: u64,
    pub n10: u64,
    pub n01: u64,
    pub n00: u64,
}

impl Contingency2x2 {
    pub fn new(n11: u64, n10: u64, n01: u64, n00: u64) -> Contingency2x2 {
        Contingency2x2 { n11, n10, n01, n00 }
    }

    pub fn total(&self) -> u64 {
        self.n11 + self.n10 + self.n01 + self.n00
    }
}

/// Odds ratio with its log, the standard error of the log, and the 95%
/// confidence interval exp(ln OR ± 1.96·SE).
#[derive(Debug, Clone, PartialEq)]
pub struct OddsRatioResult {
    pub odds_ratio: f64,
    pub log_or: f64,
    pub se_log_or: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// CI excludes 1.
    pub significant: bool,
    /// Set when the Haldane–Anscombe +0.5 correction was applied.
    pub haldane: bool,
}

const Z_95: f64 = 1.96;

fn odds_ratio_from_cells(a: f64, b: f64, c: f64, d: f64, haldane: bool) -> OddsRatioResult {
    let odds_ratio = (a * d) / (b * c);
    let log_or = odds_ratio.ln();
    let se_log_or = (1.0 / a + 1.0 / b + 1.0 / c + 1.0 / d).sqrt();
    let ci_low = (log_or - Z_95 * se_log_or).exp();
    let ci_high = (log_or + Z_95 * se_log_or).exp();
    OddsRatioResult {
        odds_ratio,
        log_or,
        se_log_or,
        ci_low,
        ci_high,
        significant: !(ci_low <= 1.0 && 1.0 <= ci_high),
        haldane,
    }
}

/// Cross-product odds ratio OR = (n11·n00)/(n10·n01) with
/// SE(ln OR) = √(1/n11 + 1/n10 + 1/n01 + 1/n00). Any zero cell is an
/// error; see [`odds_ratio_haldane`] for the corrected variant.
pub fn odds_ratio(table: &Contingency2x2) -> Result<OddsRatioResult, StatsError> {
    if table.n11 == 0 || table.n10 == 0 || table.n01 == 0 || table.n00 == 0 {
        return Err(StatsError::ZeroCell);
    }
    Ok(odds_ratio_from_cells(
        table.n11 as f64,
        table.n10 as f64,
        table.n01 as f64,
        table.n00 as f64,
        false,
    ))
}

/// Odds ratio with 0.5 added to every cell (Haldane–Anscombe); the result
/// is flagged so downstream reports can disclose the correction.
pub fn odds_ratio_haldane(table: &Contingency2x2) -> OddsRatioResult {
    odds_ratio_from_cells(
        table.n11 as f64 + 0.5,
        table.n10 as f64 + 0.5,
        table.n01 as f64 + 0.5,
        table.n00 as f64 + 0.5,
        true,
    )
}

/// Chi-square test of independence on a 2×2 table with Yates' continuity
/// correction: χ² = n·(max(|ad − bc| − n/2, 0))² / (r1·r2·c1·c2); the
/// p-value comes from the chi-square distribution with 1 degree of
/// freedom.
pub fn chi_square_yates(table: &Contingency2x2) -> Result<(f64, f64), StatsError> {
    let (a, b, c, d) = (
        table.n11 as f64,
        table.n10 as f64,
        table.n01 as f64,
        table.n00 as f64,
    );
    let n = a + b + c + d;
    let (r1, r2, c1, c2) = (a + b, c + d, a + c, b + d);
    if r1 == 0.0 || r2 == 0.0 || c1 == 0.0 || c2 == 0.0 {
        return Err(StatsError::ZeroMargin);
    }
    let corrected = ((a * d - b * c).abs() - n / 2.0).max(0.0);
    let statistic = n * corrected * corrected / (r1 * r2 * c1 * c2);
    Ok((statistic, chi_square_sf_1df(statistic)))
}

/// Mann–Whitney U result: U for the first sample, the continuity-corrected
/// z statistic, and the two-sided asymptotic p-value.
#[derive(Debug, Clone, PartialEq)]
pub struct MannWhitneyResult {
    pub u: f64,
    pub z: f64,
    pub p_two_sided: f64,
    /// All pooled values tied: σ = 0 and p is reported as 1.
    pub degenerate: bool,
}

/// Two-sided Mann–Whitney U by the asymptotic normal method with tie
/// correction and continuity correction. U comes from summed average ranks
/// of `x`; σ uses the tie-corrected variance
/// n1·n2/12 · ((n+1) − Σ(t³−t)/(n(n−1))), and the ±0.5 continuity
/// correction moves U toward its mean before dividing.
pub fn mann_whitney_u(x: &[f64], y: &[f64]) -> Result<MannWhitneyResult, StatsError> {
    if x.is_empty() || y.is_empty() {
        return Err(StatsError::EmptySample);
    }
    let n1 = x.len() as f64;
    let n2 = y.len() as f64;
    let n = n1 + n2;

    let mut pooled: Vec<f64> = Vec::with_capacity(x.len() + y.len());
    pooled.extend_from_slice(x);
    pooled.extend_from_slice(y);
    let ranks = crate::eval::average_ranks(&pooled);
    let rank_sum_x: f64 = ranks[..x.len()].iter().sum();
    let u = rank_sum_x - n1 * (n1 + 1.0) / 2.0;

    // Tie-size correction over the pooled sample.
    let mut sorted = pooled;
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    let mut tie_term = 0.0f64;
    let mut i = 0usize;
    while i < sorted.len() {
        let mut j = i;
        while j + 1 < sorted.len() && sorted[j + 1] == sorted[i] {
            j += 1;
        }
        let t = (j - i + 1) as f64;
        tie_term += t * t * t - t;
        i = j + 1;
    }

    let mean = n1 * n2 / 2.0;
    let variance = n1 * n2 / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
    let sigma = variance.max(0.0).sqrt();
    if sigma == 0.0 {
        return Ok(MannWhitneyResult {
            u,
            z: 0.0,
            p_two_sided: 1.0,
            degenerate: true,
        });
    }

    let diff = u - mean;
    // Continuity correction toward the mean.
    let corrected = if diff > 0.5 {
        diff - 0.5
    } else if diff < -0.5 {
        diff + 0.5
    } else {
        0.0
    };
    let z = corrected / sigma;
    let p = (2.0 * normal_cdf(-z.abs())).clamp(0.0, 1.0);
    Ok(MannWhitneyResult {
        u,
        z,
        p_two_sided: p,
        degenerate: false,
    })
}

/// Per-foundation fraction of documents labeled 1 within one group.
#[derive(Debug, Clone, PartialEq)]
pub struct PrevalenceReport {
    pub group: String,
    pub fractions: FoundationScores,
    pub count: usize,
}

/// Mean of the binary indicator per foundation over a non-empty group.
pub fn prevalence(
    labels: &[[bool; 5]],
    group: impl Into<String>,
) -> Result<PrevalenceReport, StatsError> {
    let group = group.into();
    if labels.is_empty() {
        return Err(StatsError::EmptyGroup(group));
    }
    let mut sums = [0.0f64; 5];
    for row in labels {
        for (slot, &bit) in sums.iter_mut().zip(row) {
            *slot += bit as u8 as f64;
        }
    }
    for slot in &mut sums {
        *slot /= labels.len() as f64;
    }
    Ok(PrevalenceReport {
        group,
        fractions: FoundationScores::from_array(sums),
        count: labels.len(),
    })
}

/// Pearson product-moment correlation.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64, StatsError> {
    if x.len() != y.len() || x.is_empty() {
        return Err(StatsError::EmptySample);
    }
    let n = x.len() as f64;
    let mean_x = x.iter().sum::<f64>() / n;
    let mean_y = y.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut var_x = 0.0;
    let mut var_y = 0.0;
    for (&xi, &yi) in x.iter().zip(y) {
        let dx = xi - mean_x;
        let dy = yi - mean_y;
        cov += dx * dy;
        var_x += dx * dx;
        var_y += dy * dy;
    }
    if var_x == 0.0 || var_y == 0.0 {
        return Err(StatsError::DegenerateVariance);
    }
    Ok(cov / (var_x.sqrt() * var_y.sqrt()))
}

/// Correlations behind the length-bias diagnostic: Pearson r between
/// document length and raw match count, and between length and the
/// length-normalized score. Zero-token documents are skipped (their
/// normalized score is undefined).
pub fn length_bias_report(
    corpus: &[TokenizedDoc],
    match_count: impl Fn(&TokenizedDoc) -> f64,
) -> Result<LengthBiasReport, StatsError> {
    let mut lengths = Vec::new();
    let mut raw = Vec::new();
    let mut normalized = Vec::new();
    for tdoc in corpus {
        let n = tdoc.token_count();
        if n == 0 {
            continue;
        }
        let count = match_count(tdoc);
        lengths.push(n as f64);
        raw.push(count);
        normalized.push(count / n as f64);
    }
    if lengths.len() < 3 {
        return Err(StatsError::EmptySample);
    }
    Ok(LengthBiasReport {
        r_raw: pearson(&lengths, &raw)?,
        r_normalized: pearson(&lengths, &normalized)?,
        documents: lengths.len(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LengthBiasReport {
    pub r_raw: f64,
    pub r_normalized: f64,
    pub documents: usize,
}

/// Mean and half-width of the 95% normal-approximation CI
/// (1.96·sd/√n, sample sd) per foundation for one keyword group.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupStats {
    pub label: String,
    pub count: usize,
    pub mean: FoundationScores,
    pub ci_half_width: FoundationScores,
}

fn group_stats(label: &str, scores: &[FoundationScores]) -> GroupStats {
    let n = scores.len() as f64;
    let mut mean = [0.0f64; 5];
    for s in scores {
        for (slot, (_, v)) in mean.iter_mut().zip(s.iter()) {
            *slot += v;
        }
    }
    for slot in &mut mean {
        *slot /= n;
    }
    let mut half = [0.0f64; 5];
    if scores.len() > 1 {
        for (i, slot) in half.iter_mut().enumerate() {
            let f = Foundation::from_index(i).expect("index");
            let ss: f64 = scores.iter().map(|s| (s.get(f) - mean[i]).powi(2)).sum();
            let sd = (ss / (n - 1.0)).sqrt();
            *slot = Z_95 * sd / n.sqrt();
        }
    }
    GroupStats {
        label: String::from(label),
        count: scores.len(),
        mean: FoundationScores::from_array(mean),
        ci_half_width: FoundationScores::from_array(half),
    }
}

/// The familial-role diagnostic: partition documents by token-level keyword
/// membership into contains-a / contains-b / neither, then report each
/// group's per-foundation mean score with a 95% CI. A document containing
/// both keywords belongs to both keyword groups.
#[derive(Debug, Clone, PartialEq)]
pub struct KeywordBiasReport {
    pub group_a: GroupStats,
    pub group_b: GroupStats,
    pub neither: GroupStats,
}

pub fn keyword_group_means(
    corpus: &[TokenizedDoc],
    scorer: impl Fn(&TokenizedDoc) -> FoundationScores,
    keyword_a: &str,
    keyword_b: &str,
) -> Result<KeywordBiasReport, StatsError> {
    let mut scores_a = Vec::new();
    let mut scores_b = Vec::new();
    let mut scores_neither = Vec::new();
    for tdoc in corpus {
        let has_a = tdoc.tokens.iter().any(|t| t == keyword_a);
        let has_b = tdoc.tokens.iter().any(|t| t == keyword_b);
        if has_a || has_b {
            let scores = scorer(tdoc);
            if has_a {
                scores_a.push(scores);
            }
            if has_b {
                scores_b.push(scores);
            }
        } else {
            scores_neither.push(scorer(tdoc));
        }
    }
    for (label, scores) in [
        (keyword_a, &scores_a),
        (keyword_b, &scores_b),
        ("neither", &scores_neither),
    ] {
        if scores.is_empty() {
            return Err(StatsError::EmptyGroup(String::from(label)));
        }
    }
    Ok(KeywordBiasReport {
        group_a: group_stats(keyword_a, &scores_a),
        group_b: group_stats(keyword_b, &scores_b),
        neither: group_stats("neither", &scores_neither),
    })
}
