//! Three-valued asymptotic judgments with their evidence.

use alloc::string::String;
use alloc::vec::Vec;

use crate::Q;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Tag {
    Holds,
    Fails,
    Inconclusive,
}

impl Tag {
    pub fn as_str(self) -> &'static str {
        match self {
            Tag::Holds => "Holds",
            Tag::Fails => "Fails",
            Tag::Inconclusive => "Inconclusive",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Evidence {
    /// Exact comparison of growth data, rendered as text.
    Symbolic { lhs: String, rhs: String, note: String },
    /// `|x| ≤ e^{ln_h}·|y|` on every sampled index below `eps0`, with the tail trend.
    Bound { ln_h: f64, eps0: Q, slope: f64 },
    /// An index where the defining inequality fails; `value` is usually `ln` of the offending ratio.
    Witness { index: Q, value: f64, note: String },
    /// A predicate true on every sampled index at or below `index`.
    Cut { index: Q, points: usize },
    /// Schedule exhausted without a decision.
    Trend { slope: f64, points: usize, note: String },
    /// A statement checked exactly (structural equality, directed rounding, ...).
    Exact { note: String },
    Parts(Vec<(String, Verdict)>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Verdict {
    pub tag: Tag,
    pub evidence: Evidence,
}

impl Verdict {
    pub fn new(tag: Tag, evidence: Evidence) -> Self {
        Verdict { tag, evidence }
    }

    pub fn holds(evidence: Evidence) -> Self {
        Verdict::new(Tag::Holds, evidence)
    }

    pub fn fails(evidence: Evidence) -> Self {
        Verdict::new(Tag::Fails, evidence)
    }

    pub fn inconclusive(evidence: Evidence) -> Self {
        Verdict::new(Tag::Inconclusive, evidence)
    }

    pub fn exact(ok: bool, note: impl Into<String>) -> Self {
        let tag = if ok { Tag::Holds } else { Tag::Fails };
        Verdict::new(tag, Evidence::Exact { note: note.into() })
    }

    pub fn is_holds(&self) -> bool {
        self.tag == Tag::Holds
    }

    pub fn is_fails(&self) -> bool {
        self.tag == Tag::Fails
    }

    pub fn is_inconclusive(&self) -> bool {
        self.tag == Tag::Inconclusive
    }

    /// True when the verdict came from an exact symbolic argument.
    pub fn is_symbolic(&self) -> bool {
        match &self.evidence {
            Evidence::Symbolic { .. } | Evidence::Exact { .. } => true,
            Evidence::Parts(p) => p.iter().all(|(_, v)| v.is_symbolic()),
            _ => false,
        }
    }

    /// Conjunction: Fails if any part fails, else Inconclusive if any part is.
    pub fn all(parts: Vec<(String, Verdict)>) -> Self {
        let tag = conj(parts.iter().map(|(_, v)| v.tag));
        Verdict::new(tag, Evidence::Parts(parts))
    }

    /// Disjunction: Holds if any part holds, Fails only if every part fails.
    pub fn any(parts: Vec<(String, Verdict)>) -> Self {
        let tag = if parts.iter().any(|(_, v)| v.is_holds()) {
            Tag::Holds
        } else if !parts.is_empty() && parts.iter().all(|(_, v)| v.is_fails()) {
            Tag::Fails
        } else {
            Tag::Inconclusive
        };
        Verdict::new(tag, Evidence::Parts(parts))
    }

    /// Swaps Holds and Fails.
    pub fn negate(mut self) -> Self {
        self.tag = match self.tag {
            Tag::Holds => Tag::Fails,
            Tag::Fails => Tag::Holds,
            t => t,
        };
        self
    }

    /// Leaf verdicts in depth-first order with their dotted paths.
    pub fn leaves(&self) -> Vec<(String, &Verdict)> {
        let mut out = Vec::new();
        self.collect("", &mut out);
        out
    }

    fn collect<'a>(&'a self, prefix: &str, out: &mut Vec<(String, &'a Verdict)>) {
        match &self.evidence {
            Evidence::Parts(p) => {
                for (name, v) in p {
                    let path = if prefix.is_empty() { name.clone() } else { alloc::format!("{prefix}.{name}") };
                    v.collect(&path, out);
                }
            }
            _ => out.push((String::from(prefix), self)),
        }
    }
}

/// Conjunction of tags.
pub fn conj(tags: impl IntoIterator<Item = Tag>) -> Tag {
    let mut out = Tag::Holds;
    for t in tags {
        match t {
            Tag::Fails => return Tag::Fails,
            Tag::Inconclusive => out = Tag::Inconclusive,
            Tag::Holds => {}
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn combinators() {
        let h = || Verdict::exact(true, "h");
        let f = || Verdict::exact(false, "f");
        let i = || Verdict::inconclusive(Evidence::Trend { slope: 0.0, points: 0, note: String::new() });
        assert_eq!(Verdict::all(alloc::vec![("a".into(), h()), ("b".into(), i())]).tag, Tag::Inconclusive);
        assert_eq!(Verdict::all(alloc::vec![("a".into(), f()), ("b".into(), i())]).tag, Tag::Fails);
        assert_eq!(Verdict::any(alloc::vec![("a".into(), f()), ("b".into(), h())]).tag, Tag::Holds);
        assert_eq!(Verdict::any(alloc::vec![("a".into(), f()), ("b".into(), f())]).tag, Tag::Fails);
        assert_eq!(Verdict::any(Vec::new()).tag, Tag::Inconclusive);
        assert_eq!(f().negate().tag, Tag::Holds);
    }
}
