//! Segment structure of the optimal action profile.
//!
//! At the optimum, consecutive types group into maximal segments that share
//! one action level; a segment is characterized by the weighted average of
//! its ratios `w_k / alpha_k` with weights `alpha_k`. The segment boundaries
//! are exactly the chain of running argmax cuts computed by
//! [`gamma_bruteforce`], and [`compute_segments`] produces them in one
//! linear stack pass: a new candidate segment absorbs every stack segment
//! with a strictly larger average, so segment averages end up nondecreasing
//! left to right, with exact ties kept as separate segments.
//!
//! Indices follow the 1-based convention used throughout the solver:
//! boundaries live in `{1, ..., m+1}` and segment `i` covers types
//! `boundaries[i] ..= boundaries[i+1] - 1`.

/// Prefix sums over weights and alphas for O(1) range averages.
#[derive(Debug, Clone)]
pub struct PrefixSums {
    w: Vec<f64>,
    a: Vec<f64>,
}

impl PrefixSums {
    pub fn new(weights: &[f64], alphas: &[f64]) -> Self {
        debug_assert_eq!(weights.len(), alphas.len());
        let mut w = Vec::with_capacity(weights.len() + 1);
        let mut a = Vec::with_capacity(alphas.len() + 1);
        w.push(0.0);
        a.push(0.0);
        for (x, y) in weights.iter().zip(alphas) {
            w.push(w.last().unwrap() + x);
            a.push(a.last().unwrap() + y);
        }
        PrefixSums { w, a }
    }

    /// Average ratio over types `l ..= k-1`, 1-based, `1 <= l < k <= m+1`.
    pub fn avg(&self, l: usize, k: usize) -> f64 {
        debug_assert!(1 <= l && l < k && k <= self.w.len());
        (self.w[k - 1] - self.w[l - 1]) / (self.a[k - 1] - self.a[l - 1])
    }

    /// Total alpha over types `l ..= k-1`.
    pub fn alpha_sum(&self, l: usize, k: usize) -> f64 {
        self.a[k - 1] - self.a[l - 1]
    }
}

/// Largest start index maximizing the trailing average before cut `k`:
/// `argmax_{1 <= l < k} avg(l, k)`, ties resolved toward the larger `l`.
///
/// Linear scan over prefix sums; reference implementation used to
/// cross-check [`compute_segments`].
pub fn gamma_bruteforce(weights: &[f64], alphas: &[f64], k: usize) -> usize {
    assert!(k >= 2 && k <= weights.len() + 1, "cut index out of range");
    let ps = PrefixSums::new(weights, alphas);
    let mut best_l = 1;
    let mut best = f64::NEG_INFINITY;
    for l in 1..k {
        let v = ps.avg(l, k);
        if v >= best {
            best = v;
            best_l = l;
        }
    }
    best_l
}

/// Maximal equal-action segments with their ratio averages and alpha mass.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentStructure {
    /// Strictly increasing cut points; first is 1, last is m+1.
    pub boundaries: Vec<usize>,
    /// Weighted ratio average per segment, nondecreasing.
    pub segment_avgs: Vec<f64>,
    /// Total alpha per segment.
    pub segment_weights: Vec<f64>,
}

impl SegmentStructure {
    pub fn num_segments(&self) -> usize {
        self.segment_avgs.len()
    }

    /// 0-based type index range covered by segment `i`.
    pub fn type_range(&self, i: usize) -> std::ops::Range<usize> {
        (self.boundaries[i] - 1)..(self.boundaries[i + 1] - 1)
    }
}

/// One-pass stack construction of the segment structure.
///
/// Each type arrives as a singleton segment with average `w_k / alpha_k`;
/// while the average atop the stack strictly exceeds the incoming average,
/// the two merge (sums add, so the merged average is the alpha-weighted
/// mean). Equal averages do not merge, which matches the larger-index tie
/// rule of [`gamma_bruteforce`].
pub fn compute_segments(weights: &[f64], alphas: &[f64]) -> SegmentStructure {
    let m = weights.len();
    assert_eq!(m, alphas.len());
    assert!(m > 0, "empty instance");
    debug_assert!(alphas.iter().all(|a| *a > 0.0));

    // Parallel stacks: segment end boundary, weight sum, alpha sum.
    let mut ends: Vec<usize> = Vec::with_capacity(m);
    let mut ws: Vec<f64> = Vec::with_capacity(m);
    let mut as_: Vec<f64> = Vec::with_capacity(m);
    for k in 0..m {
        let mut w = weights[k];
        let mut a = alphas[k];
        while let Some(top) = ws.len().checked_sub(1) {
            if ws[top] / as_[top] > w / a {
                w += ws[top];
                a += as_[top];
                ends.pop();
                ws.pop();
                as_.pop();
            } else {
                break;
            }
        }
        ends.push(k + 2);
        ws.push(w);
        as_.push(a);
    }

    let mut boundaries = Vec::with_capacity(ends.len() + 1);
    boundaries.push(1);
    boundaries.extend(ends);
    let segment_avgs = ws.iter().zip(&as_).map(|(w, a)| w / a).collect();
    SegmentStructure { boundaries, segment_avgs, segment_weights: as_ }
}

/// Chain of argmax cuts ending at 1, assembled by iterating
/// [`gamma_bruteforce`] from `m + 1` down; equals the boundary list of
/// [`compute_segments`].
pub fn gamma_chain(weights: &[f64], alphas: &[f64]) -> Vec<usize> {
    let mut chain = vec![weights.len() + 1];
    let mut k = weights.len() + 1;
    while k > 1 {
        k = gamma_bruteforce(weights, alphas, k);
        chain.push(k);
    }
    chain.reverse();
    chain
}
