//! Atoms (the 26 uppercase letters) and elements (fixed-length atom
//! sequences), plus exhaustive lexicographic enumeration.

use std::fmt;

use thiserror::Error;

/// Size of the atom alphabet.
pub const ALPHABET_SIZE: usize = 26;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ElementError {
    #[error("invalid atom symbol {0:?}: expected an uppercase letter A-Z")]
    InvalidSymbol(char),
    #[error("atom index {0} out of range 0..26")]
    IndexOutOfRange(u8),
    #[error("elements must contain at least one atom")]
    Empty,
    #[error("element length must be positive")]
    ZeroLength,
    #[error("alphabet must be non-empty")]
    EmptyAlphabet,
    #[error("population {0}^{1} does not fit in u64")]
    PopulationOverflow(usize, usize),
}

/// One of the 26 uppercase letters, stored as its zero-based index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom(u8);

impl Atom {
    pub fn from_symbol(c: char) -> Result<Self, ElementError> {
        if c.is_ascii_uppercase() {
            Ok(Atom(c as u8 - b'A'))
        } else {
            Err(ElementError::InvalidSymbol(c))
        }
    }

    pub fn from_index(i: u8) -> Result<Self, ElementError> {
        if (i as usize) < ALPHABET_SIZE {
            Ok(Atom(i))
        } else {
            Err(ElementError::IndexOutOfRange(i))
        }
    }

    /// Index with wraparound; used by cyclic arithmetic on atoms.
    pub(crate) fn from_index_wrapping(i: i64) -> Self {
        Atom(i.rem_euclid(ALPHABET_SIZE as i64) as u8)
    }

    pub fn index(self) -> u8 {
        self.0
    }

    pub fn symbol(self) -> char {
        (b'A' + self.0) as char
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

/// The bijection from atoms onto `{0..25}`.
pub fn atom_index(a: Atom) -> u8 {
    a.index()
}

/// Inverse of [`atom_index`].
pub fn atom_from_index(i: u8) -> Result<Atom, ElementError> {
    Atom::from_index(i)
}

/// Ordered, non-empty sequence of atoms. All transformations preserve its
/// length.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Element(Vec<Atom>);

impl Element {
    pub fn new(atoms: Vec<Atom>) -> Result<Self, ElementError> {
        if atoms.is_empty() {
            return Err(ElementError::Empty);
        }
        Ok(Element(atoms))
    }

    /// Parse from contiguous letters, e.g. `"APPLE"`.
    pub fn parse(s: &str) -> Result<Self, ElementError> {
        let atoms = s
            .chars()
            .map(Atom::from_symbol)
            .collect::<Result<Vec<_>, _>>()?;
        Element::new(atoms)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false // invariant: at least one atom
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.0
    }

    /// Atoms joined by single spaces, the corpus token form.
    pub fn spaced(&self) -> String {
        let mut s = String::with_capacity(self.0.len() * 2);
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                s.push(' ');
            }
            s.push(a.symbol());
        }
        s
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for a in &self.0 {
            write!(f, "{}", a.symbol())?;
        }
        Ok(())
    }
}

/// Number of distinct elements of length `l` over an alphabet of the given
/// size, or an error when it exceeds `u64`.
pub fn element_count(l: usize, alphabet_len: usize) -> Result<u64, ElementError> {
    if l == 0 {
        return Err(ElementError::ZeroLength);
    }
    if alphabet_len == 0 {
        return Err(ElementError::EmptyAlphabet);
    }
    let mut total: u64 = 1;
    for _ in 0..l {
        total = total
            .checked_mul(alphabet_len as u64)
            .ok_or(ElementError::PopulationOverflow(alphabet_len, l))?;
    }
    Ok(total)
}

/// Element at `rank` in the lexicographic enumeration over a sorted alphabet.
pub fn element_from_rank(rank: u64, l: usize, alphabet: &[Atom]) -> Result<Element, ElementError> {
    if l == 0 {
        return Err(ElementError::ZeroLength);
    }
    if alphabet.is_empty() {
        return Err(ElementError::EmptyAlphabet);
    }
    let base = alphabet.len() as u64;
    let mut digits = vec![0usize; l];
    let mut r = rank;
    for i in (0..l).rev() {
        digits[i] = (r % base) as usize;
        r /= base;
    }
    Element::new(digits.into_iter().map(|d| alphabet[d]).collect())
}

/// Deterministic stream of all `|alphabet|^l` elements of length `l`, in
/// lexicographic order over the (sorted, deduplicated) alphabet.
pub fn enumerate_elements(l: usize, alphabet: &[Atom]) -> Result<ElementIter, ElementError> {
    if l == 0 {
        return Err(ElementError::ZeroLength);
    }
    if alphabet.is_empty() {
        return Err(ElementError::EmptyAlphabet);
    }
    let mut sorted: Vec<Atom> = alphabet.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let total = element_count(l, sorted.len())?;
    Ok(ElementIter {
        alphabet: sorted,
        l,
        next: 0,
        total,
    })
}

pub struct ElementIter {
    alphabet: Vec<Atom>,
    l: usize,
    next: u64,
    total: u64,
}

impl ElementIter {
    pub fn population(&self) -> u64 {
        self.total
    }
}

impl Iterator for ElementIter {
    type Item = Element;

    fn next(&mut self) -> Option<Element> {
        if self.next >= self.total {
            return None;
        }
        let e = element_from_rank(self.next, self.l, &self.alphabet)
            .expect("rank is in range by construction");
        self.next += 1;
        Some(e)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let rem = (self.total - self.next) as usize;
        (rem, Some(rem))
    }
}

/// The full 26-letter alphabet.
pub fn full_alphabet() -> Vec<Atom> {
    (0..ALPHABET_SIZE as u8)
        .map(|i| Atom::from_index(i).expect("index in range"))
        .collect()
}

/// Atoms from a compact range or list spec such as `"A-M"` or `"ABXZ"`.
pub fn parse_alphabet(spec: &str) -> Result<Vec<Atom>, ElementError> {
    let chars: Vec<char> = spec.chars().filter(|c| !c.is_whitespace()).collect();
    let mut atoms = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        if i + 2 < chars.len() && chars[i + 1] == '-' {
            let lo = Atom::from_symbol(chars[i])?;
            let hi = Atom::from_symbol(chars[i + 2])?;
            for idx in lo.index()..=hi.index() {
                atoms.push(Atom::from_index(idx)?);
            }
            i += 3;
        } else {
            atoms.push(Atom::from_symbol(chars[i])?);
            i += 1;
        }
    }
    if atoms.is_empty() {
        return Err(ElementError::EmptyAlphabet);
    }
    atoms.sort_unstable();
    atoms.dedup();
    Ok(atoms)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atom_index_is_zero_based() {
        assert_eq!(atom_index(Atom::from_symbol('A').unwrap()), 0);
        assert_eq!(atom_index(Atom::from_symbol('Z').unwrap()), 25);
        // Derived by counting positions in the alphabet.
        assert_eq!(atom_index(Atom::from_symbol('N').unwrap()), 13);
    }

    #[test]
    fn atom_index_round_trips() {
        for i in 0..26u8 {
            let a = atom_from_index(i).unwrap();
            assert_eq!(atom_index(a), i);
            assert_eq!(Atom::from_symbol(a.symbol()).unwrap(), a);
        }
    }

    #[test]
    fn rejects_invalid_symbols() {
        assert!(Atom::from_symbol('a').is_err());
        assert!(Atom::from_symbol('1').is_err());
        assert!(atom_from_index(26).is_err());
    }

    #[test]
    fn elements_are_non_empty() {
        assert_eq!(Element::new(vec![]).unwrap_err(), ElementError::Empty);
        assert!(Element::parse("").is_err());
        assert_eq!(Element::parse("APPLE").unwrap().len(), 5);
    }

    #[test]
    fn enumeration_counts() {
        // 26^4 = 456,976 (count without materializing).
        let it = enumerate_elements(4, &full_alphabet()).unwrap();
        assert_eq!(it.population(), 456_976);
        // 26^3 by counting.
        let it = enumerate_elements(3, &full_alphabet()).unwrap();
        assert_eq!(it.count(), 17_576);
        // Single-atom alphabet.
        let all: Vec<Element> = enumerate_elements(1, &[Atom::from_symbol('A').unwrap()])
            .unwrap()
            .collect();
        assert_eq!(all, vec![Element::parse("A").unwrap()]);
    }

    #[test]
    fn enumeration_is_lexicographic_and_distinct() {
        let ab = parse_alphabet("AB").unwrap();
        let got: Vec<String> = enumerate_elements(2, &ab)
            .unwrap()
            .map(|e| e.to_string())
            .collect();
        assert_eq!(got, vec!["AA", "AB", "BA", "BB"]);
    }

    #[test]
    fn enumeration_rejects_zero_length() {
        assert!(enumerate_elements(0, &full_alphabet()).is_err());
        assert!(enumerate_elements(2, &[]).is_err());
    }

    #[test]
    fn alphabet_spec_parsing() {
        assert_eq!(parse_alphabet("A-E").unwrap().len(), 5);
        assert_eq!(parse_alphabet("N-Z").unwrap().len(), 13);
        let mixed = parse_alphabet("AC-E").unwrap();
        let symbols: String = mixed.iter().map(|a| a.symbol()).collect();
        assert_eq!(symbols, "ACDE");
        assert!(parse_alphabet("").is_err());
    }
}
