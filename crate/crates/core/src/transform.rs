//! The two fundamental transformations (per-atom alphabet rotation and
//! cyclic position shift), tagged registries, and reasoning chains built by
//! composing them.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::element::{Atom, Element, ALPHABET_SIZE};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TransformError {
    #[error("chains require at least one transformation")]
    EmptyOps,
    #[error("duplicate registry tag {0:?}")]
    DuplicateTag(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TransformKind {
    /// Rotates each atom forward in the alphabet, modulo 26.
    Rot,
    /// Cyclically shifts atom positions to the right, modulo element length.
    Shift,
}

/// A tagged transformation. The ROT parameter is canonicalized mod 26 at
/// construction; the SHIFT parameter stays as given because its period is
/// the (element-dependent) length, so it is reduced only at application.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Transformation {
    pub kind: TransformKind,
    pub param: i32,
    pub tag: String,
}

impl Transformation {
    pub fn rot(n: i32, tag: &str) -> Self {
        Transformation {
            kind: TransformKind::Rot,
            param: n.rem_euclid(ALPHABET_SIZE as i32),
            tag: tag.to_string(),
        }
    }

    pub fn shift(n: i32, tag: &str) -> Self {
        Transformation {
            kind: TransformKind::Shift,
            param: n,
            tag: tag.to_string(),
        }
    }

    /// Mathematical identity, ignoring the registry tag. Two registry
    /// entries with different tags but the same key denote the same map.
    pub fn identity_key(&self) -> (TransformKind, i32) {
        (self.kind, self.param)
    }

    pub fn apply(&self, e: &Element) -> Element {
        match self.kind {
            TransformKind::Rot => apply_rot(e, self.param),
            TransformKind::Shift => apply_shift(e, self.param),
        }
    }
}

/// Rotate every atom `n` positions forward in the alphabet:
/// `out[i] = (e[i] + n) mod 26`.
pub fn apply_rot(e: &Element, n: i32) -> Element {
    let atoms = e
        .atoms()
        .iter()
        .map(|a| Atom::from_index_wrapping(a.index() as i64 + n as i64))
        .collect();
    Element::new(atoms).expect("length preserved")
}

/// Cyclically shift atom positions `n` to the right:
/// `out[i] = e[(i - n) mod l]`. Negative `n` shifts left.
pub fn apply_shift(e: &Element, n: i32) -> Element {
    let l = e.len() as i64;
    let atoms = (0..l)
        .map(|i| e.atoms()[(i - n as i64).rem_euclid(l) as usize])
        .collect();
    Element::new(atoms).expect("length preserved")
}

/// Dispatch on the transformation kind.
pub fn apply_transformation(e: &Element, t: &Transformation) -> Element {
    t.apply(e)
}

/// Ordered set of tagged transformations; tags are unique. The default
/// registry holds `[F1]` = ROT(13) and `[F2]` = SHIFT(1).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransformationRegistry {
    entries: Vec<Transformation>,
}

impl TransformationRegistry {
    pub fn new(entries: Vec<Transformation>) -> Result<Self, TransformError> {
        let mut seen = std::collections::HashSet::new();
        for t in &entries {
            if !seen.insert(t.tag.clone()) {
                return Err(TransformError::DuplicateTag(t.tag.clone()));
            }
        }
        Ok(TransformationRegistry { entries })
    }

    pub fn push(&mut self, t: Transformation) -> Result<(), TransformError> {
        if self.by_tag(&t.tag).is_some() {
            return Err(TransformError::DuplicateTag(t.tag));
        }
        self.entries.push(t);
        Ok(())
    }

    pub fn by_tag(&self, tag: &str) -> Option<&Transformation> {
        self.entries.iter().find(|t| t.tag == tag)
    }

    pub fn entries(&self) -> &[Transformation] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

impl Default for TransformationRegistry {
    fn default() -> Self {
        TransformationRegistry::new(vec![
            Transformation::rot(13, "[F1]"),
            Transformation::shift(1, "[F2]"),
        ])
        .expect("default tags are distinct")
    }
}

/// A query element, the transformations applied to it in order, every
/// intermediate element, and the final answer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReasoningChain {
    query: Element,
    ops: Vec<Transformation>,
    intermediates: Vec<Element>,
    answer: Element,
}

impl ReasoningChain {
    pub fn query(&self) -> &Element {
        &self.query
    }

    pub fn ops(&self) -> &[Transformation] {
        &self.ops
    }

    /// Number of reasoning steps `k`; intermediates hold `k - 1` elements.
    pub fn steps(&self) -> usize {
        self.ops.len()
    }

    pub fn intermediates(&self) -> &[Element] {
        &self.intermediates
    }

    pub fn answer(&self) -> &Element {
        &self.answer
    }

    /// Re-applies the ops and checks intermediates and answer.
    pub fn replays(&self) -> bool {
        let mut cur = self.query.clone();
        for (i, op) in self.ops.iter().enumerate() {
            cur = op.apply(&cur);
            if i + 1 < self.ops.len() {
                if self.intermediates.get(i) != Some(&cur) {
                    return false;
                }
            }
        }
        cur == self.answer && self.intermediates.len() + 1 == self.ops.len()
    }

    /// Builds a chain from parts without replay validation. Used by the
    /// parser, which validates separately to distinguish error classes.
    pub(crate) fn from_parts_unchecked(
        query: Element,
        ops: Vec<Transformation>,
        intermediates: Vec<Element>,
        answer: Element,
    ) -> Self {
        ReasoningChain {
            query,
            ops,
            intermediates,
            answer,
        }
    }
}

/// Apply `ops` to `e` in sequence, recording the `k - 1` intermediate
/// elements and the final answer.
pub fn build_chain(e: &Element, ops: &[Transformation]) -> Result<ReasoningChain, TransformError> {
    if ops.is_empty() {
        return Err(TransformError::EmptyOps);
    }
    let mut intermediates = Vec::with_capacity(ops.len() - 1);
    let mut cur = e.clone();
    for op in &ops[..ops.len() - 1] {
        cur = op.apply(&cur);
        intermediates.push(cur.clone());
    }
    let answer = ops[ops.len() - 1].apply(&cur);
    Ok(ReasoningChain {
        query: e.clone(),
        ops: ops.to_vec(),
        intermediates,
        answer,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::element::{enumerate_elements, full_alphabet};

    fn el(s: &str) -> Element {
        Element::parse(s).unwrap()
    }

    #[test]
    fn rot_matches_worked_example() {
        // f_rot((A,P,P,L,E), 13) = (N,C,C,Y,R)
        assert_eq!(apply_rot(&el("APPLE"), 13), el("NCCYR"));
        // The [F1] corpus line: A A F Q -> N N S D
        assert_eq!(apply_rot(&el("AAFQ"), 13), el("NNSD"));
    }

    #[test]
    fn rot_identities() {
        let e = el("QWERTY");
        assert_eq!(apply_rot(&e, 0), e);
        assert_eq!(apply_rot(&e, 26), e);
        assert_eq!(apply_rot(&apply_rot(&e, 13), 13), e);
    }

    #[test]
    fn shift_matches_worked_example() {
        // f_pos((A,P,P,L,E), 1) = (E,A,P,P,L)
        assert_eq!(apply_shift(&el("APPLE"), 1), el("EAPPL"));
        // The appendix [F2] line "A A L P -> A L P A" is the n = -1 case.
        assert_eq!(apply_shift(&el("AALP"), -1), el("ALPA"));
    }

    #[test]
    fn shift_identities() {
        let e = el("ABCD");
        assert_eq!(apply_shift(&e, 0), e);
        assert_eq!(apply_shift(&e, 4), e);
        assert_eq!(apply_shift(&e, -4), e);
    }

    #[test]
    fn shift_periodicity_exhaustive_small() {
        for e in enumerate_elements(3, &crate::element::parse_alphabet("ABC").unwrap()).unwrap() {
            for n in -7..=7 {
                assert_eq!(apply_shift(&e, n), apply_shift(&e, n.rem_euclid(3)));
            }
        }
    }

    #[test]
    fn rot_and_shift_commute_exhaustively_l3() {
        // Exhaustive over all 26^3 elements: position shifts act on indices,
        // rotations act on values, so they commute.
        for e in enumerate_elements(3, &full_alphabet()).unwrap() {
            for (n, m) in [(13, 1), (13, -1), (5, 2), (25, -2)] {
                assert_eq!(
                    apply_rot(&apply_shift(&e, m), n),
                    apply_shift(&apply_rot(&e, n), m),
                    "failed for {e} rot {n} shift {m}"
                );
            }
        }
    }

    #[test]
    fn rot_preserves_pairwise_distances() {
        let e = el("KXQ");
        let r = apply_rot(&e, 7);
        for i in 0..3 {
            for j in 0..3 {
                let before =
                    (e.atoms()[i].index() as i32 - e.atoms()[j].index() as i32).rem_euclid(26);
                let after =
                    (r.atoms()[i].index() as i32 - r.atoms()[j].index() as i32).rem_euclid(26);
                assert_eq!(before, after);
            }
        }
    }

    #[test]
    fn shift_preserves_multiset() {
        let e = el("AABXZ");
        let mut a: Vec<u8> = e.atoms().iter().map(|x| x.index()).collect();
        let mut b: Vec<u8> = apply_shift(&e, 3).atoms().iter().map(|x| x.index()).collect();
        a.sort_unstable();
        b.sort_unstable();
        assert_eq!(a, b);
    }

    #[test]
    fn dispatch_matches_appendix_multi_step_line() {
        // "A C I A [F1] [F2]": rot13 then left shift gives P V N N.
        let rot = Transformation::rot(13, "[F1]");
        let shl = Transformation::shift(-1, "[F2]");
        let mid = apply_transformation(&el("ACIA"), &rot);
        assert_eq!(mid, el("NPVN"));
        assert_eq!(apply_transformation(&mid, &shl), el("PVNN"));
        let e = el("GG");
        assert_eq!(apply_transformation(&e, &Transformation::rot(0, "[F0]")), e);
    }

    #[test]
    fn chains_record_intermediates_and_answer() {
        // "N O V S [F2] [F2]" with the left-shift reading.
        let shl = Transformation::shift(-1, "[F2]");
        let chain = build_chain(&el("NOVS"), &[shl.clone(), shl]).unwrap();
        assert_eq!(chain.intermediates(), &[el("OVSN")]);
        assert_eq!(chain.answer(), &el("VSNO"));
        assert!(chain.replays());

        // Double rot13 is the identity; expected line "N N N Q ... A A A D".
        let rot = Transformation::rot(13, "[R1]");
        let chain = build_chain(&el("AAAD"), &[rot.clone(), rot]).unwrap();
        assert_eq!(chain.intermediates(), &[el("NNNQ")]);
        assert_eq!(chain.answer(), &el("AAAD"));
    }

    #[test]
    fn right_shift_reading_of_direct_answer_case() {
        // "A A A B [F1] [F2]" answered O N N N is the n = +1 case.
        let ops = [Transformation::rot(13, "[F1]"), Transformation::shift(1, "[F2]")];
        let chain = build_chain(&el("AAAB"), &ops).unwrap();
        assert_eq!(chain.answer(), &el("ONNN"));
    }

    #[test]
    fn single_step_chain_has_no_intermediates() {
        let chain = build_chain(&el("XY"), &[Transformation::rot(0, "[F0]")]).unwrap();
        assert!(chain.intermediates().is_empty());
        assert_eq!(chain.answer(), &el("XY"));
        assert!(chain.replays());
    }

    #[test]
    fn empty_ops_rejected() {
        assert_eq!(
            build_chain(&el("AB"), &[]).unwrap_err(),
            TransformError::EmptyOps
        );
    }

    #[test]
    fn registry_rejects_duplicate_tags() {
        let err = TransformationRegistry::new(vec![
            Transformation::rot(13, "[F1]"),
            Transformation::shift(1, "[F1]"),
        ])
        .unwrap_err();
        assert_eq!(err, TransformError::DuplicateTag("[F1]".into()));
    }

    #[test]
    fn default_registry_layout() {
        let reg = TransformationRegistry::default();
        assert_eq!(reg.by_tag("[F1]").unwrap().identity_key(), (TransformKind::Rot, 13));
        assert_eq!(reg.by_tag("[F2]").unwrap().identity_key(), (TransformKind::Shift, 1));
    }

    #[test]
    fn rot_param_is_canonical_shift_param_is_raw() {
        assert_eq!(Transformation::rot(39, "[X]").param, 13);
        assert_eq!(Transformation::rot(-13, "[X]").param, 13);
        assert_eq!(Transformation::shift(-1, "[X]").param, -1);
        assert_eq!(Transformation::shift(5, "[X]").param, 5);
    }
}
