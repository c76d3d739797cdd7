//! Sets of indices, the eventual quantifier, big-O, limits, the order `>_𝕀`
//! and morphisms of index sets.
//!
//! Only segmented downward-directed index sets are instantiable. The interval
//! `𝕀^s = (0,1]` and the reversed naturals `ℕ̄` are built in; any other such
//! set is presented by a decreasing chain together with its pre-order and a
//! meet witness.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_traits::{One, Signed, ToPrimitive};

use crate::bigfloat::{self, BigFloat};
use crate::netlang::dominance::{compare_nets, dominant_term, poly_limit, Rel};
use crate::netlang::growth::{as_eps_net, growth_key, magnitude, Growth, GrowthKey, Mag};
use crate::netlang::normal::{substitute_var, to_poly};
use crate::netlang::print::rational_string;
use crate::netlang::{eval, limit_at_zero, Env, EvalError, Expr, ExtLimit, HybridNet, SamplingSchedule, Side, Var};
use crate::verdict::{Evidence, Verdict};
use crate::Q;

/// Slope of `ln|x/y|` against `−ln ε` above which growth counts as real.
pub const SLOPE_TOL: f64 = 0.05;
/// Relative tolerance of the Cauchy tail test for sampled limits.
pub const CAUCHY_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub enum IndexError {
    Mismatch(String),
    Unsupported(&'static str),
    Eval(EvalError),
}

impl From<EvalError> for IndexError {
    fn from(e: EvalError) -> Self {
        IndexError::Eval(e)
    }
}

impl fmt::Display for IndexError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IndexError::Mismatch(s) => write!(f, "index-set mismatch: {s}"),
            IndexError::Unsupported(s) => write!(f, "unsupported index set: {s}"),
            IndexError::Eval(e) => write!(f, "evaluation failed: {e:?}"),
        }
    }
}

/// A segmented downward-directed pre-order presented by a sample chain.
///
/// `chain` runs downwards: `chain[k+1] ≤ chain[k]`, and every element has a
/// lower bound further along. Index-set values are rationals; nets over it
/// are written in `eps`.
#[derive(Clone)]
pub struct CanonicalIndex {
    pub name: String,
    pub chain: Vec<Q>,
    pub le: Arc<dyn Fn(&Q, &Q) -> bool + Send + Sync>,
    pub meet: Arc<dyn Fn(&Q, &Q) -> Q + Send + Sync>,
}

impl fmt::Debug for CanonicalIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CanonicalIndex").field("name", &self.name).field("chain", &self.chain).finish()
    }
}

impl PartialEq for CanonicalIndex {
    fn eq(&self, o: &Self) -> bool {
        self.name == o.name && self.chain == o.chain
    }
}

impl CanonicalIndex {
    /// Checks reflexivity and transitivity on sampled triples and the meet witness on pairs.
    pub fn validate(&self) -> Result<(), IndexError> {
        let c = &self.chain;
        if c.len() < 2 {
            return Err(IndexError::Unsupported("chain needs at least two elements"));
        }
        for a in c {
            if !(self.le)(a, a) {
                return Err(IndexError::Unsupported("comparator is not reflexive"));
            }
        }
        for a in c {
            for b in c {
                let m = (self.meet)(a, b);
                if !(self.le)(&m, a) || !(self.le)(&m, b) {
                    return Err(IndexError::Unsupported("meet witness is not a common lower bound"));
                }
                for d in c {
                    if (self.le)(a, b) && (self.le)(b, d) && !(self.le)(a, d) {
                        return Err(IndexError::Unsupported("comparator is not transitive"));
                    }
                }
            }
        }
        for w in c.windows(2) {
            if !(self.le)(&w[1], &w[0]) {
                return Err(IndexError::Unsupported("chain is not decreasing"));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum IndexSet {
    /// `(0,1]` with the usual order.
    Is,
    /// `ℕ` with the reversed order; nets are written in `n`.
    NBar,
    Canonical(CanonicalIndex),
}

impl IndexSet {
    pub fn name(&self) -> String {
        match self {
            IndexSet::Is => "Is".into(),
            IndexSet::NBar => "Nbar".into(),
            IndexSet::Canonical(c) => c.name.clone(),
        }
    }

    pub fn canonical(c: CanonicalIndex) -> Result<IndexSet, IndexError> {
        c.validate()?;
        Ok(IndexSet::Canonical(c))
    }

    /// The variable nets on this set are written in.
    pub fn var(&self) -> Var {
        match self {
            IndexSet::NBar => Var::N,
            _ => Var::Eps,
        }
    }

    /// Sample indices, heading towards the small end.
    pub fn sample(&self, sched: &SamplingSchedule) -> Vec<Q> {
        self.sample_with(sched, &[])
    }

    /// Sample indices with extra `ε`-coordinates (ignored off `𝕀^s`).
    pub fn sample_with(&self, sched: &SamplingSchedule, extra: &[Q]) -> Vec<Q> {
        match self {
            IndexSet::Is => sched.points_with(extra),
            IndexSet::NBar => {
                let mut out: Vec<Q> = Vec::new();
                for e in sched.points() {
                    let n = e.recip().round().max(Q::one());
                    if out.last() != Some(&n) {
                        out.push(n);
                    }
                }
                out
            }
            IndexSet::Canonical(c) => c.chain.clone(),
        }
    }

    /// `ε`-coordinate of a sample index: `1/n` on `ℕ̄`, the index itself elsewhere.
    pub fn eps_of(&self, p: &Q) -> Q {
        match self {
            IndexSet::NBar => p.recip(),
            _ => p.clone(),
        }
    }

    /// Rewrites a net on this set as a net in `ε`.
    pub fn eps_net(&self, e: &Expr) -> Expr {
        as_eps_net(e)
    }

    /// Whether the real value `v` lies in the down-segment `(∅, a]`.
    pub fn in_segment(&self, v: &Q, a: &Q) -> bool {
        match self {
            IndexSet::Is => v.is_positive() && v <= a,
            IndexSet::NBar => v.is_integer() && v >= a,
            IndexSet::Canonical(c) => (c.le)(v, a),
        }
    }

    fn symbolic(&self) -> bool {
        !matches!(self, IndexSet::Canonical(_))
    }

    /// Evaluates a net at a sample index.
    pub fn eval_at(&self, e: &Expr, p: &Q, digits: u32) -> Result<BigFloat, EvalError> {
        let ctx = bigfloat::Ctx::from_digits(digits + 10);
        let env: Env<BigFloat> = match self {
            IndexSet::NBar => Env::at(&p.recip(), ctx).with_n(BigFloat::from_q(p, ctx)),
            _ => Env::at(p, ctx),
        };
        let e = match self {
            IndexSet::NBar => e.clone(),
            _ => as_eps_net(e),
        };
        Ok(eval(&e, &env, ctx)?.round_to(bigfloat::Ctx::from_digits(digits)))
    }
}

/// `ln q` for a positive rational, without underflow.
pub fn ln_q(q: &Q) -> f64 {
    BigFloat::from_bigint(q.numer()).ln_abs_f64() - BigFloat::from_bigint(q.denom()).ln_abs_f64()
}

fn hybrid_switches(e: &Expr, out: &mut Vec<Q>) {
    match e {
        Expr::Hybrid(h) => {
            let h: &HybridNet = h;
            out.extend(h.switches.iter().cloned());
            hybrid_switches(&h.low, out);
            hybrid_switches(&h.high, out);
        }
        Expr::Var(_) | Expr::Param | Expr::Const(_) | Expr::Pi => {}
        Expr::Unary(_, a) | Expr::Pow(a, _) => hybrid_switches(a, out),
        Expr::Binary(_, a, b) | Expr::PowGeneral(a, b) | Expr::Compose(a, b) => {
            hybrid_switches(a, out);
            hybrid_switches(b, out);
        }
        Expr::Primitive(p) => hybrid_switches(&p.upper, out),
        Expr::Convolve(c) => {
            hybrid_switches(&c.scale, out);
            hybrid_switches(&c.at, out);
        }
    }
}

fn has_hybrid(e: &Expr) -> bool {
    let mut v = Vec::new();
    hybrid_switches(e, &mut v);
    !v.is_empty() || matches!(e, Expr::Hybrid(_))
}

fn sym(lhs: impl ToString, rhs: impl ToString, note: impl Into<String>) -> Evidence {
    Evidence::Symbolic { lhs: lhs.to_string(), rhs: rhs.to_string(), note: note.into() }
}

fn trend(slope: f64, points: usize, note: impl Into<String>) -> Evidence {
    Evidence::Trend { slope, points, note: note.into() }
}

/// Renders a key in its reported form `(c, −a, b)`.
pub fn key_string(k: &GrowthKey) -> String {
    let (c, na, b) = k.triple();
    format!("({}, {}, {})", rational_string(&c), rational_string(&na), rational_string(&b))
}

/// Least-squares slope of `ys` against `xs`.
pub fn ls_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return 0.0;
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

/// One sampled value of `ln|x/y|` at `ε`, with `L = −ln ε`.
#[derive(Clone, Debug, PartialEq)]
pub struct RatioSample {
    pub eps: Q,
    pub neg_ln_eps: f64,
    pub ln_ratio: f64,
}

impl RatioSample {
    pub fn new(eps: Q, ln_ratio: f64) -> Self {
        let neg_ln_eps = -ln_q(&eps);
        RatioSample { eps, neg_ln_eps, ln_ratio }
    }
}

/// Sampled big-O decision on precomputed log-ratios, listed with `ε` decreasing.
///
/// The tail starts at `tail_start`. Fails needs at least three running-maximum
/// records, the last one in the final third of the samples, each rising faster
/// than `SLOPE_TOL` per unit of `−ln ε`. Holds needs a tail spanning three
/// decades whose upper envelope does not rise faster than `SLOPE_TOL`.
pub fn ratio_verdict(s: &[RatioSample], tail_start: usize) -> Verdict {
    let n = s.len();
    if n < 2 || tail_start >= n {
        return Verdict::inconclusive(trend(0.0, n, "too few samples"));
    }
    let tail = &s[tail_start..];
    let infs = tail.iter().filter(|r| r.ln_ratio == f64::INFINITY).count();
    if infs > 0 {
        let last = &s[n - 1];
        if last.ln_ratio == f64::INFINITY && infs >= 2 {
            return Verdict::fails(Evidence::Witness {
                index: last.eps.clone(),
                value: f64::INFINITY,
                note: "y vanishes where x does not".into(),
            });
        }
        return Verdict::inconclusive(trend(0.0, tail.len(), "y vanishes at isolated samples"));
    }
    if tail.iter().all(|r| r.ln_ratio == f64::NEG_INFINITY) {
        return Verdict::holds(Evidence::Bound { ln_h: f64::NEG_INFINITY, eps0: tail[0].eps.clone(), slope: 0.0 });
    }
    let finite: Vec<&RatioSample> = tail.iter().filter(|r| r.ln_ratio.is_finite()).collect();
    let xs: Vec<f64> = finite.iter().map(|r| r.neg_ln_eps).collect();
    let ys: Vec<f64> = finite.iter().map(|r| r.ln_ratio).collect();
    let slope = ls_slope(&xs, &ys);

    // running-maximum records over the tail
    let mut records: Vec<usize> = Vec::new();
    let mut best = f64::NEG_INFINITY;
    for (i, r) in s.iter().enumerate().skip(tail_start) {
        if r.ln_ratio.is_finite() && r.ln_ratio > best {
            best = r.ln_ratio;
            records.push(i);
        }
    }
    let steep = records.windows(2).all(|w| {
        let (a, b) = (&s[w[0]], &s[w[1]]);
        (b.ln_ratio - a.ln_ratio) / (b.neg_ln_eps - a.neg_ln_eps) > SLOPE_TOL
    });
    if records.len() >= 3 && steep && *records.last().unwrap() * 3 >= 2 * (n - 1) {
        let w = &s[*records.last().unwrap()];
        return Verdict::fails(Evidence::Witness {
            index: w.eps.clone(),
            value: w.ln_ratio,
            note: format!("ln|x/y| sets {} increasing records, slope {:.3} per unit of -ln eps", records.len(), slope),
        });
    }
    let increasing = ys.windows(2).all(|w| w[1] > w[0]);
    if increasing && ys.len() >= 3 {
        return Verdict::inconclusive(trend(slope, ys.len(), "ratio increasing without a clear rate"));
    }
    // the upper envelope must not keep rising
    let mid = ys.len() / 2;
    if mid >= 1 {
        let early = ys[..mid].iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let late = ys[mid..].iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if late > early + SLOPE_TOL * (xs[xs.len() - 1] - xs[mid - 1]) {
            return Verdict::inconclusive(trend(slope, ys.len(), "ratio envelope trends upward"));
        }
    }
    let decades = (tail[tail.len() - 1].neg_ln_eps - tail[0].neg_ln_eps) / core::f64::consts::LN_10;
    if decades < 3.0 - 1e-9 {
        return Verdict::inconclusive(trend(slope, ys.len(), "tail spans fewer than three decades"));
    }
    let ln_h = ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Verdict::holds(Evidence::Bound { ln_h, eps0: tail[0].eps.clone(), slope })
}

fn ln_abs_sign(v: &BigFloat) -> (f64, i8) {
    let s = if v.is_zero() {
        0
    } else if v.is_negative() {
        -1
    } else {
        1
    };
    (v.ln_abs_f64(), s)
}

/// Big-O by sampling `ln|x| − ln|y|` at the given indices.
pub fn sampled_big_o(x: &Expr, y: &Expr, set: &IndexSet, points: &[Q], digits: u32, tail_start: usize) -> Verdict {
    let mut samples = Vec::with_capacity(points.len());
    for p in points {
        let (vx, vy) = match (set.eval_at(x, p, digits), set.eval_at(y, p, digits)) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(e), _) | (_, Err(e)) => {
                return Verdict::inconclusive(trend(0.0, samples.len(), format!("evaluation failed at {}: {e:?}", rational_string(p))));
            }
        };
        let (lx, sx) = ln_abs_sign(&vx);
        let (ly, sy) = ln_abs_sign(&vy);
        let lr = match (sx, sy) {
            (0, _) => f64::NEG_INFINITY,
            (_, 0) => f64::INFINITY,
            _ => lx - ly,
        };
        samples.push(RatioSample::new(set.eps_of(p), lr));
    }
    ratio_verdict(&samples, tail_start)
}

/// Exact big-O on nets in `ε`, when the symbolic machinery decides it.
pub fn symbolic_big_o(x: &Expr, y: &Expr) -> Option<Verdict> {
    let (x, y) = (as_eps_net(x), as_eps_net(y));
    let free = |e: &Expr| e.mentions(Var::X) || e.mentions(Var::T) || e.mentions(Var::N) || e.mentions_param();
    if free(&x) || free(&y) || has_hybrid(&x) || has_hybrid(&y) {
        return None;
    }
    let (px, py) = (to_poly(&x), to_poly(&y));
    if px.is_zero() {
        return Some(Verdict::holds(sym(&x, &y, "x is identically zero")));
    }
    if py.is_zero() {
        return Some(Verdict::fails(sym(&x, &y, "y is identically zero")));
    }
    if let (Growth::Key(kx), Growth::Key(ky)) = (growth_key(&x), growth_key(&y)) {
        let ok = kx <= ky;
        let note = if ok { "key(x) <= key(y)" } else { "key(x) > key(y)" };
        return Some(Verdict::new(if ok { crate::verdict::Tag::Holds } else { crate::verdict::Tag::Fails }, sym(key_string(&kx), key_string(&ky), note)));
    }
    if let Some(rel) = compare_nets(&x, &y) {
        return Some(match rel {
            Rel::Less => Verdict::holds(sym(&x, &y, "x/y -> 0 by dominant terms")),
            Rel::Equal(r) => Verdict::holds(sym(&x, &y, format!("x/y -> {r:.6e} by dominant terms"))),
            Rel::Greater => Verdict::fails(sym(&x, &y, "x/y -> infinity by dominant terms")),
        });
    }
    match (magnitude(&x), magnitude(&y)) {
        (Mag::Exact { key: a, .. } | Mag::AtMost { key: a }, Mag::Exact { key: b, .. }) if a <= b => {
            return Some(Verdict::holds(sym(key_string(&a), key_string(&b), "|x| = O(key(x)) and key(x) <= key(y)")));
        }
        (Mag::Exact { key: a, .. }, Mag::Exact { key: b, .. } | Mag::AtMost { key: b }) if a > b => {
            return Some(Verdict::fails(sym(key_string(&a), key_string(&b), "key(x) > key(y) with x of exact size")));
        }
        _ => {}
    }
    match limit_at_zero(&x.clone().div(y.clone()))? {
        ExtLimit::Finite(v, _) => Some(Verdict::holds(sym(&x, &y, format!("x/y -> {v:.6e}")))),
        _ => Some(Verdict::fails(sym(&x, &y, "|x/y| -> infinity"))),
    }
}

/// `x = O(y)` on `set`: symbolic when possible, else sampled.
pub fn big_o(x: &Expr, y: &Expr, set: &IndexSet, sched: &SamplingSchedule) -> Verdict {
    if set.symbolic() {
        if let Some(v) = symbolic_big_o(x, y) {
            return v;
        }
    }
    let mut extra = Vec::new();
    hybrid_switches(x, &mut extra);
    hybrid_switches(y, &mut extra);
    let points = set.sample_with(sched, &extra);
    sampled_big_o(x, y, set, &points, sched.digits, points.len() / 2)
}

/// Outcome of the eventual quantifier on the samples.
pub fn eventually<F>(mut p: F, set: &IndexSet, sched: &SamplingSchedule) -> Result<Verdict, EvalError>
where
    F: FnMut(&Q) -> Result<bool, EvalError>,
{
    let points = set.sample(sched);
    eventually_on(&mut p, &points)
}

/// The eventual quantifier on explicit sample indices.
pub fn eventually_on<F>(p: &mut F, points: &[Q]) -> Result<Verdict, EvalError>
where
    F: FnMut(&Q) -> Result<bool, EvalError>,
{
    let k = points.len();
    let mut vals = Vec::with_capacity(k);
    for q in points {
        vals.push(p(q)?);
    }
    let cut = vals.iter().rposition(|v| !v).map_or(0, |i| i + 1);
    if k > 0 && 2 * cut < k {
        return Ok(Verdict::holds(Evidence::Cut { index: points[cut].clone(), points: k - cut }));
    }
    let tail = k.div_ceil(2);
    let bad: Vec<usize> = (tail..k).filter(|&i| !vals[i]).collect();
    let true_count = (tail..k).filter(|&i| vals[i]).count();
    if bad.len() >= 2 && bad.last().is_some_and(|&i| i + 2 >= k) {
        let i = *bad.last().unwrap();
        return Ok(Verdict::fails(Evidence::Witness {
            index: points[i].clone(),
            value: bad.len() as f64,
            note: format!("predicate fails at {} of {} tail samples", bad.len(), k - tail),
        }));
    }
    Ok(Verdict::inconclusive(trend(0.0, k - tail, format!("predicate true at {true_count} of {} tail samples", k - tail))))
}

/// Result of a limit computation.
#[derive(Clone, Debug, PartialEq)]
pub struct LimitReport {
    pub value: Option<ExtLimit>,
    pub symbolic: bool,
}

impl LimitReport {
    pub fn describe(&self) -> String {
        match self.value {
            None => "undetermined".into(),
            Some(ExtLimit::PosInf) => "+inf".into(),
            Some(ExtLimit::NegInf) => "-inf".into(),
            Some(ExtLimit::Finite(v, Side::Above)) => format!("{v}+"),
            Some(ExtLimit::Finite(v, Side::Below)) => format!("{v}-"),
            Some(ExtLimit::Finite(v, _)) => format!("{v}"),
        }
    }
}

/// Symbolic limit of a net in `ε`.
pub fn symbolic_limit(e: &Expr) -> Option<ExtLimit> {
    let e = as_eps_net(e);
    if has_hybrid(&e) || e.mentions(Var::X) || e.mentions(Var::T) || e.mentions_param() {
        return limit_at_zero(&e);
    }
    if let Some(l) = limit_at_zero(&e) {
        return Some(l);
    }
    if let Some(l) = poly_limit(&to_poly(&e)) {
        return Some(l);
    }
    match magnitude(&e) {
        Mag::Zero => Some(ExtLimit::Finite(0.0, Side::Exact)),
        Mag::Exact { key, lead } => match key.direction() {
            Ordering::Greater => Some(if lead > 0.0 { ExtLimit::PosInf } else { ExtLimit::NegInf }),
            Ordering::Less => Some(ExtLimit::Finite(0.0, if lead > 0.0 { Side::Above } else { Side::Below })),
            Ordering::Equal => None,
        },
        Mag::AtMost { key } if key.direction() == Ordering::Less => Some(ExtLimit::Finite(0.0, Side::Unknown)),
        _ => None,
    }
}

/// Sampled limit on explicit indices.
pub fn sampled_limit(f: &Expr, set: &IndexSet, points: &[Q], digits: u32) -> Option<ExtLimit> {
    let mut vals = Vec::new();
    let mut ls = Vec::new();
    for p in points {
        let v = set.eval_at(f, p, digits).ok()?;
        let (l, s) = ln_abs_sign(&v);
        vals.push((v.to_f64(), l, s));
        ls.push(-ln_q(&set.eps_of(p)));
    }
    let n = vals.len();
    if n < 4 {
        return None;
    }
    let tail = &vals[n - 4..];
    let last = tail[3].0;
    if last.is_finite() && tail.iter().all(|t| (t.0 - last).abs() <= CAUCHY_TOL * last.abs().max(1.0)) {
        if last.abs() < CAUCHY_TOL {
            let side = if tail.iter().all(|t| t.2 > 0) {
                Side::Above
            } else if tail.iter().all(|t| t.2 < 0) {
                Side::Below
            } else {
                Side::Unknown
            };
            return Some(ExtLimit::Finite(0.0, side));
        }
        return Some(ExtLimit::Finite(last, Side::Unknown));
    }
    let half = n / 2;
    let lt: Vec<f64> = vals[half..].iter().map(|t| t.1).collect();
    if lt.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let sign = vals[half].2;
    if sign == 0 || vals[half..].iter().any(|t| t.2 != sign) {
        return None;
    }
    let slope = ls_slope(&ls[half..], &lt);
    if lt.windows(2).all(|w| w[1] > w[0]) && slope > SLOPE_TOL {
        return Some(if sign > 0 { ExtLimit::PosInf } else { ExtLimit::NegInf });
    }
    if lt.windows(2).all(|w| w[1] < w[0]) && slope < -SLOPE_TOL {
        return Some(ExtLimit::Finite(0.0, if sign > 0 { Side::Above } else { Side::Below }));
    }
    None
}

/// `lim f` along `set`.
pub fn limit(f: &Expr, set: &IndexSet, sched: &SamplingSchedule) -> LimitReport {
    if set.symbolic() {
        if let Some(v) = symbolic_limit(f) {
            return LimitReport { value: Some(v), symbolic: true };
        }
    }
    let mut extra = Vec::new();
    hybrid_switches(f, &mut extra);
    let points = set.sample_with(sched, &extra);
    LimitReport { value: sampled_limit(f, set, &points, sched.digits), symbolic: false }
}

/// `i >_𝕀 j`: `i > j` for all sufficiently small indices.
pub fn order_gt(i: &Expr, j: &Expr, set: &IndexSet, sched: &SamplingSchedule) -> Verdict {
    let d = i.clone().sub(j.clone());
    if set.symbolic() && !has_hybrid(&d) {
        let de = as_eps_net(&d);
        if to_poly(&de).is_zero() {
            return Verdict::fails(sym(i, j, "i - j vanishes identically"));
        }
        if let Some(l) = symbolic_limit(&de) {
            let decided = match l {
                ExtLimit::PosInf => Some(true),
                ExtLimit::NegInf => Some(false),
                ExtLimit::Finite(v, _) if v > 0.0 => Some(true),
                ExtLimit::Finite(v, _) if v < 0.0 => Some(false),
                ExtLimit::Finite(_, Side::Above) => Some(true),
                ExtLimit::Finite(_, Side::Below | Side::Exact) => Some(false),
                ExtLimit::Finite(_, Side::Unknown) => None,
            };
            if let Some(ok) = decided {
                let tag = if ok { crate::verdict::Tag::Holds } else { crate::verdict::Tag::Fails };
                return Verdict::new(tag, sym(i, j, format!("lim (i - j) = {}", LimitReport { value: Some(l), symbolic: true }.describe())));
            }
        }
        if let Some(dom) = dominant_term(&de) {
            let ok = dom.lead > 0.0;
            let tag = if ok { crate::verdict::Tag::Holds } else { crate::verdict::Tag::Fails };
            return Verdict::new(tag, sym(i, j, format!("dominant term of i - j has sign {}", if ok { "+" } else { "-" })));
        }
    }
    let digits = sched.digits;
    let r = eventually(|p| Ok(set.eval_at(&d, p, digits)?.is_positive()), set, sched);
    r.unwrap_or_else(|e| Verdict::inconclusive(trend(0.0, 0, format!("evaluation failed: {e:?}"))))
}

/// A morphism `𝕀₁ → 𝕀₂` with underlying map `f: I₂ → I₁`, written in the variable of `𝕀₂`.
#[derive(Clone, Debug, PartialEq)]
pub struct IndexMorphism {
    pub source: IndexSet,
    pub target: IndexSet,
    pub map: Expr,
}

impl IndexMorphism {
    pub fn new(source: IndexSet, target: IndexSet, map: Expr) -> Self {
        IndexMorphism { source, target, map }
    }

    pub fn identity(set: IndexSet) -> Self {
        let map = Expr::Var(set.var());
        IndexMorphism { source: set.clone(), target: set, map }
    }

    /// `λ(ε) = −1/log ε` on `𝕀^s`.
    pub fn lambda() -> Self {
        IndexMorphism::new(IndexSet::Is, IndexSet::Is, Expr::lambda())
    }

    /// `η(ε) = e^{−1/ε}` on `𝕀^s`.
    pub fn eta() -> Self {
        IndexMorphism::new(IndexSet::Is, IndexSet::Is, Expr::eta())
    }

    /// Evaluates the underlying map at a sample index of the target.
    pub fn eval_at(&self, p: &Q, digits: u32) -> Result<BigFloat, EvalError> {
        self.target.eval_at(&self.map, p, digits)
    }
}

/// Criterion (ii) on the sample chains: every source segment `(∅,a]` receives
/// some target segment `(∅,b]`.
fn segment_criterion(f: &IndexMorphism, sched: &SamplingSchedule) -> Result<Verdict, IndexError> {
    let src = f.source.sample(sched);
    let tgt = f.target.sample(sched);
    let mut vals = Vec::with_capacity(tgt.len());
    for c in &tgt {
        vals.push(f.eval_at(c, sched.digits)?.to_q());
    }
    let needed = src.len().div_ceil(2);
    for a in src.iter().take(needed) {
        // smallest suffix of target samples mapped into (∅,a]
        let start = vals.iter().rposition(|v| !f.source.in_segment(v, a)).map_or(0, |i| i + 1);
        if start >= tgt.len() || 2 * start > tgt.len() + 1 {
            let ok_late = start < tgt.len();
            let ev = Evidence::Witness {
                index: a.clone(),
                value: start as f64,
                note: format!("no sampled segment of {} maps into (., {}]", f.target.name(), rational_string(a)),
            };
            return Ok(if ok_late { Verdict::inconclusive(ev) } else { Verdict::fails(ev) });
        }
    }
    Ok(Verdict::holds(Evidence::Cut { index: src[needed - 1].clone(), points: needed }))
}

/// Checks that `f` is a morphism of index sets.
pub fn check_morphism(f: &IndexMorphism, sched: &SamplingSchedule) -> Result<Verdict, IndexError> {
    if f.map.mentions(Var::X) || f.map.mentions(Var::T) || f.map.mentions_param() {
        return Err(IndexError::Unsupported("underlying map has free variables besides the index"));
    }
    if matches!(f.target, IndexSet::Canonical(_)) || matches!(f.source, IndexSet::Canonical(_)) {
        return segment_criterion(f, sched);
    }
    let lim = limit(&f.map, &f.target, sched);
    let lim_note = format!("lim f = {}", lim.describe());
    let ev = |note: String| if lim.symbolic { sym(&f.map, "", note) } else { trend(0.0, sched.count, note) };
    let last = f.target.sample(sched).pop().unwrap_or_else(Q::one);
    match (&f.source, lim.value) {
        (_, None) => segment_criterion(f, sched),
        (IndexSet::Is, Some(ExtLimit::Finite(v, side))) if v == 0.0 => {
            if side == Side::Above {
                return Ok(Verdict::holds(ev(lim_note)));
            }
            let digits = sched.digits;
            let pos = eventually(
                |p| {
                    let v = f.eval_at(p, digits)?;
                    Ok(v.is_positive() && v.cmp_total(&BigFloat::one()) != Ordering::Greater)
                },
                &f.target,
                sched,
            )?;
            Ok(Verdict::all(alloc::vec![("limit".into(), Verdict::holds(ev(lim_note))), ("values in (0,1]".into(), pos)]))
        }
        (IndexSet::Is, Some(ExtLimit::Finite(v, _))) => Ok(Verdict::fails(Evidence::Witness {
            index: last,
            value: v,
            note: format!("{lim_note}; no segment maps into (0, {}]", (v / 2.0).clamp(0.0, 1.0)),
        })),
        (IndexSet::Is, Some(_)) => Ok(Verdict::fails(Evidence::Witness {
            index: last,
            value: f64::INFINITY,
            note: format!("{lim_note}; no segment maps into (0, 1/2]"),
        })),
        (IndexSet::NBar, Some(ExtLimit::PosInf)) => {
            let digits = sched.digits;
            let int = eventually(|p| Ok(f.eval_at(p, digits)?.is_integer()), &f.target, sched)?;
            Ok(Verdict::all(alloc::vec![("limit".into(), Verdict::holds(ev(lim_note))), ("integer values".into(), int)]))
        }
        (IndexSet::NBar, Some(_)) => Ok(Verdict::fails(Evidence::Witness {
            index: last,
            value: 0.0,
            note: format!("{lim_note}; f is not eventually beyond every n"),
        })),
        (IndexSet::Canonical(_), _) => segment_criterion(f, sched),
    }
}

/// `f ∘ g` as a morphism `𝕀₁ → 𝕀₃`: the underlying map is `f.map ∘ g.map`.
pub fn compose_morphisms(f: &IndexMorphism, g: &IndexMorphism) -> Result<IndexMorphism, IndexError> {
    if f.target != g.source {
        return Err(IndexError::Mismatch(format!("{} -> {} then {} -> {}", f.source.name(), f.target.name(), g.source.name(), g.target.name())));
    }
    let map = substitute_var(&native(&f.map, &f.target), f.target.var(), &g.map);
    Ok(IndexMorphism { source: f.source.clone(), target: g.target.clone(), map })
}

/// Writes a net on `set` in its own variable.
fn native(x: &Expr, set: &IndexSet) -> Expr {
    match set {
        IndexSet::NBar if x.mentions(Var::Eps) => x.subst_var(Var::Eps, &Expr::one().div(Expr::n())),
        _ => x.clone(),
    }
}

/// `x ∘ f`: the net `x` on the source of `f`, seen on its target.
pub fn transport(x: &Expr, f: &IndexMorphism) -> Expr {
    substitute_var(&native(x, &f.source), f.source.var(), &f.map)
}

/// An asymptotic statement about nets on one index set.
#[derive(Clone, Debug, PartialEq)]
pub enum Statement {
    Order { i: Expr, j: Expr },
    BigO { x: Expr, y: Expr },
    Limit { f: Expr },
}

impl Statement {
    pub fn transport(&self, f: &IndexMorphism) -> Statement {
        match self {
            Statement::Order { i, j } => Statement::Order { i: transport(i, f), j: transport(j, f) },
            Statement::BigO { x, y } => Statement::BigO { x: transport(x, f), y: transport(y, f) },
            Statement::Limit { f: g } => Statement::Limit { f: transport(g, f) },
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Statement::Order { i, j } => format!("{i} > {j}"),
            Statement::BigO { x, y } => format!("{x} = O({y})"),
            Statement::Limit { f } => format!("lim {f}"),
        }
    }

    /// Runs the statement; a limit statement holds when the limit is determined.
    pub fn run(&self, set: &IndexSet, sched: &SamplingSchedule) -> (Verdict, Option<ExtLimit>) {
        match self {
            Statement::Order { i, j } => (order_gt(i, j, set, sched), None),
            Statement::BigO { x, y } => (big_o(x, y, set, sched), None),
            Statement::Limit { f } => {
                let r = limit(f, set, sched);
                let note = format!("lim = {}", r.describe());
                let ev = if r.symbolic { sym(f, "", note) } else { trend(0.0, sched.count, note) };
                let v = if r.value.is_some() { Verdict::holds(ev) } else { Verdict::inconclusive(ev) };
                (v, r.value)
            }
        }
    }
}

fn same_limit(a: &ExtLimit, b: &ExtLimit) -> bool {
    match (a, b) {
        (ExtLimit::PosInf, ExtLimit::PosInf) | (ExtLimit::NegInf, ExtLimit::NegInf) => true,
        (ExtLimit::Finite(x, _), ExtLimit::Finite(y, _)) => (x - y).abs() <= CAUCHY_TOL * x.abs().max(1.0),
        _ => false,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PreservationCase {
    pub name: String,
    pub statement: Statement,
    pub before: Verdict,
    pub after: Verdict,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PreservationReport {
    pub cases: Vec<PreservationCase>,
    pub verdict: Verdict,
}

/// Re-runs each statement that holds on the source along `f` and asks it to hold on the target.
pub fn preservation_suite(f: &IndexMorphism, cases: &[(String, Statement)], sched: &SamplingSchedule) -> PreservationReport {
    let mut out = Vec::new();
    let mut parts = Vec::new();
    for (name, st) in cases {
        let (before, l1) = st.run(&f.source, sched);
        let moved = st.transport(f);
        let (mut after, l2) = moved.run(&f.target, sched);
        if let (Some(a), Some(b)) = (l1, l2) {
            if !same_limit(&a, &b) {
                after = Verdict::fails(Evidence::Exact {
                    note: format!(
                        "limit moved from {} to {}",
                        LimitReport { value: Some(a), symbolic: true }.describe(),
                        LimitReport { value: Some(b), symbolic: true }.describe()
                    ),
                });
            }
        }
        if before.is_holds() {
            parts.push((name.clone(), after.clone()));
        }
        out.push(PreservationCase { name: name.clone(), statement: st.clone(), before, after });
    }
    PreservationReport { cases: out, verdict: Verdict::all(parts) }
}

/// `ℕ̄` as an integer-valued map `n ↦ ⌊1/ε⌋` out of `𝕀^s`.
pub fn nbar_floor() -> IndexMorphism {
    IndexMorphism::new(IndexSet::NBar, IndexSet::Is, Expr::one().div(Expr::eps()).floor())
}

/// `𝕀^s` presented as a canonical chain; useful for exercising the generic path.
pub fn interval_chain(sched: &SamplingSchedule) -> CanonicalIndex {
    CanonicalIndex {
        name: "Is-chain".into(),
        chain: sched.points(),
        le: Arc::new(|a: &Q, b: &Q| a.is_positive() && a <= b),
        meet: Arc::new(|a: &Q, b: &Q| a.clone().min(b.clone())),
    }
}

/// `ln|x/y|` at one index, for callers that build their own samples.
pub fn ln_ratio_at(x: &Expr, y: &Expr, set: &IndexSet, p: &Q, digits: u32) -> Result<f64, EvalError> {
    let (lx, sx) = ln_abs_sign(&set.eval_at(x, p, digits)?);
    let (ly, sy) = ln_abs_sign(&set.eval_at(y, p, digits)?);
    Ok(match (sx, sy) {
        (0, _) => f64::NEG_INFINITY,
        (_, 0) => f64::INFINITY,
        _ => lx - ly,
    })
}

/// Integer part of a positive rational, for reporting `ℕ̄` indices.
pub fn as_natural(q: &Q) -> Option<u64> {
    if q.is_integer() && !q.is_negative() {
        q.to_integer().to_u64()
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netlang::{parse_with, qr, ParseOptions};

    fn p(s: &str) -> Expr {
        parse_with(s, ParseOptions::extended()).unwrap()
    }

    fn sched() -> SamplingSchedule {
        SamplingSchedule::default()
    }

    #[test]
    fn eventual_quantifier() {
        let s = sched();
        let v = eventually(|e| Ok(*e < qr(1, 2)), &IndexSet::Is, &s).unwrap();
        assert!(v.is_holds());
        let v = eventually(|n| Ok(*n >= Q::from_integer(10.into())), &IndexSet::NBar, &s).unwrap();
        assert!(v.is_holds());
        let sinp = p("sin(1/eps)");
        let v = eventually(|e| Ok(IndexSet::Is.eval_at(&sinp, e, 50)?.is_positive()), &IndexSet::Is, &s).unwrap();
        assert!(!v.is_holds());
    }

    #[test]
    fn big_o_examples() {
        let s = sched();
        assert!(big_o(&p("pow(eps,2)"), &p("eps"), &IndexSet::Is, &s).is_holds());
        assert!(big_o(&p("eps + pow(eps,2)*sin(1/eps)"), &p("eps"), &IndexSet::Is, &s).is_holds());
        let v = big_o(&p("exp(1/eps)"), &p("pow(eps,-5)"), &IndexSet::Is, &s);
        assert!(v.is_fails() && v.is_symbolic());
        let ln = ln_ratio_at(&p("exp(1/eps)"), &p("pow(eps,-5)"), &IndexSet::Is, &qr(1, 1000), 50).unwrap();
        assert!(ln > 300.0 * core::f64::consts::LN_10);
        // the sampled oracle agrees
        let pts = s.points();
        assert!(sampled_big_o(&p("exp(1/eps)"), &p("pow(eps,-5)"), &IndexSet::Is, &pts, 50, 6).is_fails());
        assert!(sampled_big_o(&p("pow(eps,2)"), &p("eps"), &IndexSet::Is, &pts, 50, 6).is_holds());
        assert!(sampled_big_o(&p("eps + pow(eps,2)*sin(1/eps)"), &p("eps"), &IndexSet::Is, &pts, 50, 6).is_holds());
    }

    #[test]
    fn limits() {
        let s = sched();
        let l = limit(&p("eps"), &IndexSet::Is, &s).value.unwrap();
        assert!(matches!(l, ExtLimit::Finite(v, _) if v == 0.0));
        assert!(limit(&p("-1/log(eps)"), &IndexSet::Is, &s).value.unwrap().is_zero_from_above());
        assert_eq!(limit(&p("exp(1/eps)"), &IndexSet::Is, &s).value, Some(ExtLimit::PosInf));
        let chain = IndexSet::canonical(interval_chain(&s)).unwrap();
        assert_eq!(limit(&p("exp(1/eps)"), &chain, &s).value, Some(ExtLimit::PosInf));
        assert!(matches!(limit(&p("2 + eps"), &chain, &s).value, Some(ExtLimit::Finite(v, _)) if (v - 2.0).abs() < 1e-8));
    }

    #[test]
    fn morphisms() {
        let s = sched();
        let sq = IndexMorphism::new(IndexSet::Is, IndexSet::Is, p("pow(eps,2)"));
        assert!(check_morphism(&sq, &s).unwrap().is_holds());
        let to_nbar = IndexMorphism::new(IndexSet::Is, IndexSet::NBar, p("1/(n+1)"));
        assert!(check_morphism(&to_nbar, &s).unwrap().is_holds());
        let c = IndexMorphism::new(IndexSet::Is, IndexSet::Is, p("1"));
        assert!(check_morphism(&c, &s).unwrap().is_fails());
        assert!(check_morphism(&nbar_floor(), &s).unwrap().is_holds());
        let ll = compose_morphisms(&IndexMorphism::lambda(), &IndexMorphism::lambda()).unwrap();
        assert!(check_morphism(&ll, &s).unwrap().is_holds());
        let id = compose_morphisms(&IndexMorphism::eta(), &IndexMorphism::lambda()).unwrap();
        assert_eq!(id.map, Expr::eps());
        let id = compose_morphisms(&IndexMorphism::lambda(), &IndexMorphism::eta()).unwrap();
        assert_eq!(id.map, Expr::eps());
        let chain = IndexSet::canonical(interval_chain(&s)).unwrap();
        let generic = IndexMorphism::new(chain.clone(), chain.clone(), p("pow(eps,2)"));
        assert!(check_morphism(&generic, &s).unwrap().is_holds());
        let bad = IndexMorphism::new(chain.clone(), chain, p("1/2 + eps"));
        assert!(check_morphism(&bad, &s).unwrap().is_fails());
        assert!(compose_morphisms(&to_nbar, &sq).is_err());
    }

    #[test]
    fn preservation() {
        let s = sched();
        let cases = alloc::vec![
            ("order".to_string(), Statement::Order { i: p("1/eps"), j: p("1") }),
            ("bigo".to_string(), Statement::BigO { x: p("pow(eps,2)"), y: p("eps") }),
        ];
        let r = preservation_suite(&IndexMorphism::lambda(), &cases, &s);
        assert!(r.verdict.is_holds(), "{r:?}");
        let cube = IndexMorphism::new(IndexSet::Is, IndexSet::Is, p("pow(eps,3)"));
        assert!(preservation_suite(&cube, &cases, &s).verdict.is_holds());
        let lim = alloc::vec![("limit".to_string(), Statement::Limit { f: p("-1/log(eps)") })];
        let r = preservation_suite(&IndexMorphism::eta(), &lim, &s);
        assert!(r.verdict.is_holds());
        assert_eq!(Statement::Limit { f: p("-1/log(eps)") }.transport(&IndexMorphism::eta()), Statement::Limit { f: Expr::eps() });
    }

    #[test]
    fn hybrid_nets_are_sampled() {
        let s = sched();
        let h = Expr::Hybrid(Arc::new(HybridNet {
            low: p("1/eps"),
            high: p("exp(1/eps)"),
            switches: alloc::vec![Q::one(), qr(1, 10), qr(1, 100), qr(1, 1000)],
        }));
        let v = big_o(&p("1/eps"), &h, &IndexSet::Is, &s);
        assert!(!v.is_symbolic());
    }
}
