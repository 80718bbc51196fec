//! Extraction of a too-good rectangle from a robust embedding.
//!
//! Edge multisets are kept as lists of base-edge indices: `Ŵ` holds every
//! base edge `e` (standing for `Emb(e)`), `W` the deduplicated ones whose image
//! wins round `s`. Weights, BAD pruning, dyadic buckets and the wrap-around
//! labels all follow the round-`s` components of `f_X` and `f_Y`.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{BucketRow, Error, Result};
use crate::fortify::parallel_count;
use crate::game::{Game, Strategy, Symbol};
use crate::rational::Rational;
use crate::repetition::{blowup, RepStrategy, RepeatedGame};

use super::embedding::{winning_edges, EmbeddingMap};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractionTrace {
    pub s: usize,
    pub i: usize,
    pub z: Rational,
    pub eps: Rational,
    pub robustness_fraction: Rational,
    /// `|Ŵ| = |E|`.
    pub hat_size: usize,
    /// Edges dropped as parallel copies of an earlier edge.
    pub dedup_dropped: Vec<usize>,
    pub w: Vec<usize>,
    pub weights_x: BTreeMap<usize, usize>,
    pub weights_y: BTreeMap<usize, usize>,
    pub bad_x: Vec<Vec<usize>>,
    pub bad_y: Vec<Vec<usize>>,
    pub w_prime: Vec<usize>,
    pub hat_prime: Vec<usize>,
    pub x_prime: Vec<Vec<usize>>,
    pub y_prime: Vec<Vec<usize>>,
    /// `(i, j, |Ŵ′ ∩ (S_i×T_j)|, |W′ ∩ (S_i×T_j)|)`.
    pub bucket_table: Vec<BucketRow>,
    pub bucket: (usize, usize),
    pub w_star: (usize, usize),
    pub w_max: (usize, usize),
    /// `(l, m, |Ŵ′ ∩ (M_l×N_m)|, |W′ ∩ (M_l×N_m)|)`, labels from 1.
    pub label_table: Vec<BucketRow>,
    pub labels: (usize, usize),
    pub m: Vec<Vec<usize>>,
    pub n: Vec<Vec<usize>>,
    pub m_s: Vec<usize>,
    pub n_s: Vec<usize>,
    /// Round-`s` answers on `M_s` and `N_s`, indexed by position.
    pub strategy: Strategy,
    /// `|W′ ∩ (M×N)|`.
    pub rect_wins: usize,
    /// `|E ∩ (M_s×N_s)|`.
    pub rect_edges: usize,
    pub satisfied_fraction: Rational,
    pub anomalies: Vec<String>,
}

/// `max(0, ⌈log₂w⌉ − 1)`, so bucket `i` holds weights in `(2^i, 2^(i+1)]`, and 1 sits in bucket 0.
pub fn bucket_of(w: usize) -> usize {
    (Rational::from_int(w as i64).ceil_log2() as usize).saturating_sub(1)
}

/// `W ⊆ Ŵ` with `|Ŵ \ W| ≤ r·|Ŵ|`, nonempty.
fn close(hat: usize, won: usize, r: Rational) -> bool {
    hat > 0 && Rational::from_int((hat - won) as i64) <= r * Rational::from_int(hat as i64)
}

struct Sides<'a> {
    g: &'a Game,
    emb: &'a EmbeddingMap,
    s: usize,
}

impl Sides<'_> {
    fn x(&self, e: usize) -> &[usize] {
        &self.emb.f_x[self.g.edges()[e].0]
    }
    fn y(&self, e: usize) -> &[usize] {
        &self.emb.f_y[self.g.edges()[e].1]
    }
    fn xs(&self, e: usize) -> usize {
        self.x(e)[self.s - 1]
    }
    fn ys(&self, e: usize) -> usize {
        self.y(e)[self.s - 1]
    }
}

/// `w_v = |{v̄ ∈ im(f): v̄_s = v}|` for every `v` with positive weight.
fn weights(f: &[Vec<usize>], s: usize) -> BTreeMap<usize, usize> {
    let image: BTreeSet<&Vec<usize>> = f.iter().collect();
    let mut w = BTreeMap::new();
    for v in image {
        *w.entry(v[s - 1]).or_default() += 1;
    }
    w
}

/// Best pair by `|Ŵ′ ∩ cell|` among close cells, ties to the smallest pair.
fn select(table: &[BucketRow], r: Rational) -> Option<(usize, usize)> {
    let mut best: Option<&BucketRow> = None;
    for row in table {
        if close(row.2, row.3, r) && best.is_none_or(|b| row.2 > b.2) {
            best = Some(row);
        }
    }
    best.map(|b| (b.0, b.1))
}

#[allow(clippy::too_many_arguments)]
pub fn extract_rectangle(
    h: &RepeatedGame,
    psi: &RepStrategy,
    s: usize,
    emb: &EmbeddingMap,
    eps: Rational,
) -> Result<ExtractionTrace> {
    let g = h.base();
    let m_edges = g.size();
    if m_edges == 0 {
        return Err(Error::EmptyGame);
    }
    if eps <= Rational::ZERO || eps >= Rational::ONE {
        return Err(Error::EpsOutOfRange(eps));
    }
    if s == 0 || s > h.k() {
        return Err(Error::InvalidParameter(format!("round {s} outside [1, {}]", h.k())));
    }
    let parallel = parallel_count(g);
    let bound = eps * Rational::from_int(m_edges as i64);
    if Rational::from_int(parallel as i64) > bound {
        return Err(Error::ParallelEdgesExceeded { count: parallel, bound });
    }
    let wins = winning_edges(h, psi, &[s], emb)?;
    let robustness_fraction = Rational::frac(wins.iter().filter(|&&w| w).count(), m_edges);
    if robustness_fraction < Rational::ONE - eps {
        return Err(Error::NotRobustEnough {
            fraction: robustness_fraction,
        });
    }
    let z = blowup(h)?;
    let sides = Sides { g, emb, s };
    let mut anomalies = Vec::new();
    if !emb.injective() {
        anomalies.push("embedding is not injective; image graph is not isomorphic to G".to_string());
    }

    // (1) W and Ŵ, ignoring parallel copies in the domain
    let mut seen = BTreeSet::new();
    let mut dedup_dropped = Vec::new();
    let mut w = Vec::new();
    for (e, &(x, y)) in g.edges().iter().enumerate() {
        if !seen.insert((x, y)) {
            dedup_dropped.push(e);
        } else if wins[e] {
            w.push(e);
        }
    }
    let hat: Vec<usize> = (0..m_edges).collect();

    // (2) weights and BAD pruning
    let weights_x = weights(&emb.f_x, s);
    let weights_y = weights(&emb.f_y, s);
    let two_z = Rational::from_int(2) * z;
    let heavy = |wt: &BTreeMap<usize, usize>, v: usize| Rational::from_int(wt[&v] as i64) > two_z;
    let image = |f: &[Vec<usize>]| -> BTreeSet<Vec<usize>> { f.iter().cloned().collect() };
    let (img_x, img_y) = (image(&emb.f_x), image(&emb.f_y));
    let bad_x: Vec<Vec<usize>> = img_x.iter().filter(|v| heavy(&weights_x, v[s - 1])).cloned().collect();
    let bad_y: Vec<Vec<usize>> = img_y.iter().filter(|v| heavy(&weights_y, v[s - 1])).cloned().collect();
    let x_prime: Vec<Vec<usize>> = img_x.iter().filter(|v| !heavy(&weights_x, v[s - 1])).cloned().collect();
    let y_prime: Vec<Vec<usize>> = img_y.iter().filter(|v| !heavy(&weights_y, v[s - 1])).cloned().collect();
    let good_edge = |e: &usize| !heavy(&weights_x, sides.xs(*e)) && !heavy(&weights_y, sides.ys(*e));
    let w_prime: Vec<usize> = w.iter().copied().filter(good_edge).collect();
    let hat_prime: Vec<usize> = hat.iter().copied().filter(good_edge).collect();

    // (3) dyadic weight buckets
    let nb = (two_z.ceil_log2() as usize).max(1);
    let bx = |e: usize| bucket_of(weights_x[&sides.xs(e)]);
    let by = |e: usize| bucket_of(weights_y[&sides.ys(e)]);
    let mut hat_cells = vec![vec![0usize; nb]; nb];
    let mut w_cells = vec![vec![0usize; nb]; nb];
    for &e in &hat_prime {
        hat_cells[bx(e).min(nb - 1)][by(e).min(nb - 1)] += 1;
    }
    for &e in &w_prime {
        w_cells[bx(e).min(nb - 1)][by(e).min(nb - 1)] += 1;
    }
    let bucket_table: Vec<BucketRow> = (0..nb)
        .flat_map(|i| (0..nb).map(move |j| (i, j)))
        .map(|(i, j)| (i, j, hat_cells[i][j], w_cells[i][j]))
        .collect();
    let two_eps = Rational::from_int(2) * eps;
    let Some((bi, bj)) = select(&bucket_table, two_eps) else {
        return Err(Error::NoGoodBucket {
            stage: "weights",
            table: bucket_table,
        });
    };
    let in_s = |v: &Vec<usize>| bucket_of(weights_x[&v[s - 1]]) == bi;
    let in_t = |v: &Vec<usize>| bucket_of(weights_y[&v[s - 1]]) == bj;

    // (4) wrap-around labels
    let two_z_floor = two_z.floor() as usize;
    let w_star = (1usize << bi, 1usize << bj);
    let w_max = ((2 * w_star.0).min(two_z_floor).max(1), (2 * w_star.1).min(two_z_floor).max(1));
    let classes = |members: &[Vec<usize>], keep: &dyn Fn(&Vec<usize>) -> bool| {
        let mut cls: BTreeMap<usize, Vec<Vec<usize>>> = BTreeMap::new();
        for v in members.iter().filter(|v| keep(v)) {
            cls.entry(v[s - 1]).or_default().push(v.clone());
        }
        cls
    };
    let cls_x = classes(&x_prime, &in_s);
    let cls_y = classes(&y_prime, &in_t);
    let label_set = |cls: &BTreeMap<usize, Vec<Vec<usize>>>, l: usize| -> BTreeSet<Vec<usize>> {
        cls.values().map(|c| c[(l - 1) % c.len()].clone()).collect()
    };
    let ms: Vec<BTreeSet<Vec<usize>>> = (1..=w_max.0).map(|l| label_set(&cls_x, l)).collect();
    let ns: Vec<BTreeSet<Vec<usize>>> = (1..=w_max.1).map(|l| label_set(&cls_y, l)).collect();
    let count = |list: &[usize], a: &BTreeSet<Vec<usize>>, b: &BTreeSet<Vec<usize>>| {
        list.iter()
            .filter(|&&e| a.contains(sides.x(e)) && b.contains(sides.y(e)))
            .count()
    };
    let mut label_table = Vec::new();
    for (l, a) in ms.iter().enumerate() {
        for (m, b) in ns.iter().enumerate() {
            label_table.push((l + 1, m + 1, count(&hat_prime, a, b), count(&w_prime, a, b)));
        }
    }
    let eight_eps = Rational::from_int(8) * eps;
    let Some((li, lj)) = select(&label_table, eight_eps) else {
        return Err(Error::NoGoodBucket {
            stage: "labels",
            table: label_table,
        });
    };
    let m_set = &ms[li - 1];
    let n_set = &ns[lj - 1];

    // (5) projection to round s
    let m: Vec<Vec<usize>> = m_set.iter().cloned().collect();
    let n: Vec<Vec<usize>> = n_set.iter().cloned().collect();
    let mut pairs_x: Vec<(usize, &Vec<usize>)> = m.iter().map(|v| (v[s - 1], v)).collect();
    let mut pairs_y: Vec<(usize, &Vec<usize>)> = n.iter().map(|v| (v[s - 1], v)).collect();
    pairs_x.sort();
    pairs_y.sort();
    let m_s: Vec<usize> = pairs_x.iter().map(|p| p.0).collect();
    let n_s: Vec<usize> = pairs_y.iter().map(|p| p.0).collect();
    let mut undefined = 0usize;
    let mut answer = |a: Result<&[Symbol]>| match a {
        Ok(a) => a[s - 1],
        Err(_) => {
            undefined += 1;
            0
        }
    };
    let strategy = Strategy {
        psi_x: pairs_x.iter().map(|p| answer(psi.answer_x(p.1))).collect(),
        psi_y: pairs_y.iter().map(|p| answer(psi.answer_y(p.1))).collect(),
    };
    if undefined > 0 {
        anomalies.push(format!("{undefined} rectangle vertices have no answer in psi; answered 0"));
    }
    let rect_wins = count(&w_prime, m_set, n_set);
    let ms_set: BTreeSet<usize> = m_s.iter().copied().collect();
    let ns_set: BTreeSet<usize> = n_s.iter().copied().collect();
    let rect_edges = g
        .edges()
        .iter()
        .filter(|(x, y)| ms_set.contains(x) && ns_set.contains(y))
        .count();
    let satisfied_fraction = if rect_edges == 0 {
        anomalies.push("rectangle M_s × N_s has no edges".to_string());
        Rational::ZERO
    } else {
        Rational::frac(rect_wins, rect_edges)
    };

    Ok(ExtractionTrace {
        s,
        i: emb.i,
        z,
        eps,
        robustness_fraction,
        hat_size: hat.len(),
        dedup_dropped,
        w,
        weights_x,
        weights_y,
        bad_x,
        bad_y,
        w_prime,
        hat_prime,
        x_prime,
        y_prime,
        bucket_table,
        bucket: (bi, bj),
        w_star,
        w_max,
        label_table,
        labels: (li, lj),
        m,
        n,
        m_s,
        n_s,
        strategy,
        rect_wins,
        rect_edges,
        satisfied_fraction,
        anomalies,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateCheck {
    /// `|W′| ≥ (1 − 3ε)|E|`.
    pub w_prime_bound: bool,
    pub bucket_close: bool,
    pub labels_close: bool,
    pub one_to_one: bool,
    pub all_pass: bool,
}

impl ExtractionTrace {
    /// Recomputes the selected cells' counts from the stored multisets and
    /// checks the closeness certificates, the post-pruning size bound and the
    /// one-to-one projection.
    pub fn verify_certificates(&self, g: &Game, emb: &EmbeddingMap) -> CertificateCheck {
        let sides = Sides { g, emb, s: self.s };
        let total = Rational::from_int(self.hat_size as i64);
        let w_prime_bound =
            Rational::from_int(self.w_prime.len() as i64) >= (Rational::ONE - Rational::from_int(3) * self.eps) * total;
        let bx = |e: usize| bucket_of(self.weights_x[&sides.xs(e)]) == self.bucket.0;
        let by = |e: usize| bucket_of(self.weights_y[&sides.ys(e)]) == self.bucket.1;
        let cell = |list: &[usize]| list.iter().filter(|&&e| bx(e) && by(e)).count();
        let bucket_close = close(cell(&self.hat_prime), cell(&self.w_prime), Rational::from_int(2) * self.eps);
        let m: BTreeSet<&Vec<usize>> = self.m.iter().collect();
        let n: BTreeSet<&Vec<usize>> = self.n.iter().collect();
        let rect = |list: &[usize]| {
            list.iter()
                .filter(|&&e| m.contains(&sides.x(e).to_vec()) && n.contains(&sides.y(e).to_vec()))
                .count()
        };
        let labels_close = close(rect(&self.hat_prime), rect(&self.w_prime), Rational::from_int(8) * self.eps)
            && rect(&self.w_prime) == self.rect_wins;
        let distinct = |v: &[usize]| v.windows(2).all(|p| p[0] < p[1]);
        let one_to_one =
            self.m_s.len() == self.m.len() && self.n_s.len() == self.n.len() && distinct(&self.m_s) && distinct(&self.n_s);
        CertificateCheck {
            w_prime_bound,
            bucket_close,
            labels_close,
            one_to_one,
            all_pass: w_prime_bound && bucket_close && labels_close && one_to_one,
        }
    }
}
