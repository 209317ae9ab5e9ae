//! Corpus generation, the manifest sidecar recording exactly which sets a
//! corpus was built from, and corpus file IO.

pub mod line;
pub mod mixture;
pub mod perturb;
pub mod splits;

use std::collections::BTreeSet;
use std::io::{BufRead, Write};
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::element::{element_count, element_from_rank, Atom, Element, ElementError};
use crate::transform::{build_chain, TransformKind, Transformation, TransformationRegistry};

pub use line::{parse_line, serialize_chain, ChainLine, LineError, ANSWER_MARKER, THINK_MARKER};
pub use mixture::{build_sft_mixture, MixtureError, SftMixture};
pub use perturb::{
    default_noise_tokens, perturb_line, PerturbationMode, PerturbationRegion, PerturbationSpec,
    PerturbedLine, PerturbError,
};
pub use splits::{
    make_element_split, make_length_split, make_step_split, make_transformation_split,
    ElementMode, ElementSplit, ElementSplitParams, LengthSplit, ShiftLevel, ShiftSpec,
    SplitError, StepSplit, TransformationSplit,
};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("composition list must be non-empty")]
    EmptyCompositions,
    #[error("composition {0} is empty")]
    EmptyComposition(usize),
    #[error("subsample of {requested} exceeds population {population}")]
    SubsampleExceedsPopulation { requested: u64, population: u64 },
    #[error("explicit element {0} has length {1}, expected {2}")]
    MixedElementLength(usize, usize, usize),
    #[error("no elements to generate from")]
    NoElements,
    #[error(transparent)]
    Element(#[from] ElementError),
    #[error(transparent)]
    Line(#[from] LineError),
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("manifest error: {0}")]
    Manifest(String),
}

/// Where the query elements of a corpus come from.
#[derive(Debug, Clone)]
pub enum ElementSource {
    /// The full lexicographic population over an alphabet subset.
    Alphabet(Vec<Atom>),
    /// An explicit element list (split constructions).
    Explicit(Vec<Element>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Subsample {
    pub count: u64,
    pub seed: u64,
}

/// Everything needed to generate a corpus deterministically: one line per
/// (element, composition) pair, optionally subsampled under a seed.
#[derive(Debug, Clone)]
pub struct CorpusSpec {
    pub element_length: usize,
    pub source: ElementSource,
    pub compositions: Vec<Vec<Transformation>>,
    pub subsample: Option<Subsample>,
}

impl CorpusSpec {
    pub fn over_alphabet(
        element_length: usize,
        alphabet: Vec<Atom>,
        compositions: Vec<Vec<Transformation>>,
    ) -> Self {
        CorpusSpec {
            element_length,
            source: ElementSource::Alphabet(alphabet),
            compositions,
            subsample: None,
        }
    }

    pub fn with_subsample(mut self, count: u64, seed: u64) -> Self {
        self.subsample = Some(Subsample { count, seed });
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestTransform {
    pub tag: String,
    pub kind: TransformKind,
    pub param: i32,
}

impl From<&Transformation> for ManifestTransform {
    fn from(t: &Transformation) -> Self {
        ManifestTransform {
            tag: t.tag.clone(),
            kind: t.kind,
            param: t.param,
        }
    }
}

/// Ground truth for what a corpus contains: the element sets per position,
/// the transformation set, the composition set, step counts, and the seed.
/// All shift-level bookkeeping and TGC scoring read from this.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusManifest {
    pub element_length: usize,
    pub alphabet: Vec<char>,
    /// Atoms observed at each query position across the corpus.
    pub per_position_atoms: Vec<Vec<char>>,
    pub transformations: Vec<ManifestTransform>,
    /// Ordered tag sequences; constituents resolve via `transformations`.
    pub compositions: Vec<Vec<String>>,
    pub step_counts: Vec<usize>,
    pub line_count: u64,
    pub seed: Option<u64>,
}

impl CorpusManifest {
    pub fn position_allows(&self, position: usize, atom: Atom) -> bool {
        self.per_position_atoms
            .get(position)
            .map(|set| set.binary_search(&atom.symbol()).is_ok())
            .unwrap_or(false)
    }

    pub fn has_transformation(&self, key: (TransformKind, i32)) -> bool {
        self.transformations
            .iter()
            .any(|t| (t.kind, t.param) == key)
    }

    pub fn has_composition(&self, keys: &[(TransformKind, i32)]) -> bool {
        self.compositions.iter().any(|tags| {
            tags.len() == keys.len()
                && tags.iter().zip(keys).all(|(tag, key)| {
                    self.transformations
                        .iter()
                        .any(|t| &t.tag == tag && (t.kind, t.param) == *key)
                })
        })
    }

    pub fn save(&self, path: &Path) -> Result<(), CorpusError> {
        let body = toml::to_string_pretty(self).map_err(|e| CorpusError::Manifest(e.to_string()))?;
        std::fs::write(path, body).map_err(|e| CorpusError::Io {
            path: path.display().to_string(),
            source: e,
        })
    }

    pub fn load(path: &Path) -> Result<Self, CorpusError> {
        let body = std::fs::read_to_string(path).map_err(|e| CorpusError::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        toml::from_str(&body).map_err(|e| CorpusError::Manifest(e.to_string()))
    }
}

/// Generate the corpus for a spec: one line per (element, composition)
/// pair, composition-major, bit-identical across runs for the same spec.
pub fn generate_corpus(
    spec: &CorpusSpec,
    registry: &TransformationRegistry,
) -> Result<(Vec<ChainLine>, CorpusManifest), CorpusError> {
    if spec.compositions.is_empty() {
        return Err(CorpusError::EmptyCompositions);
    }
    for (i, comp) in spec.compositions.iter().enumerate() {
        if comp.is_empty() {
            return Err(CorpusError::EmptyComposition(i));
        }
    }

    let (alphabet, n_elements): (Vec<Atom>, u64) = match &spec.source {
        ElementSource::Alphabet(atoms) => {
            let mut sorted = atoms.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.is_empty() {
                return Err(CorpusError::Element(ElementError::EmptyAlphabet));
            }
            let n = element_count(spec.element_length, sorted.len())?;
            (sorted, n)
        }
        ElementSource::Explicit(elements) => {
            if elements.is_empty() {
                return Err(CorpusError::NoElements);
            }
            for (i, e) in elements.iter().enumerate() {
                if e.len() != spec.element_length {
                    return Err(CorpusError::MixedElementLength(
                        i,
                        e.len(),
                        spec.element_length,
                    ));
                }
            }
            let atoms: BTreeSet<Atom> =
                elements.iter().flat_map(|e| e.atoms().iter().copied()).collect();
            (atoms.into_iter().collect(), elements.len() as u64)
        }
    };

    let population = (spec.compositions.len() as u64)
        .checked_mul(n_elements)
        .ok_or(ElementError::PopulationOverflow(
            n_elements as usize,
            spec.compositions.len(),
        ))?;

    let indices: Vec<u64> = match spec.subsample {
        None => (0..population).collect(),
        Some(Subsample { count, seed }) => {
            if count > population {
                return Err(CorpusError::SubsampleExceedsPopulation {
                    requested: count,
                    population,
                });
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut picked: Vec<u64> =
                rand::seq::index::sample(&mut rng, population as usize, count as usize)
                    .into_iter()
                    .map(|i| i as u64)
                    .collect();
            picked.sort_unstable();
            picked
        }
    };

    let mut lines = Vec::with_capacity(indices.len());
    let mut per_position: Vec<BTreeSet<char>> = vec![BTreeSet::new(); spec.element_length];
    let mut step_counts: BTreeSet<usize> = BTreeSet::new();

    for idx in indices {
        let comp = &spec.compositions[(idx / n_elements) as usize];
        let rank = idx % n_elements;
        let element = match &spec.source {
            ElementSource::Alphabet(_) => {
                element_from_rank(rank, spec.element_length, &alphabet)?
            }
            ElementSource::Explicit(elements) => elements[rank as usize].clone(),
        };
        for (i, a) in element.atoms().iter().enumerate() {
            per_position[i].insert(a.symbol());
        }
        step_counts.insert(comp.len());
        let chain = build_chain(&element, comp).expect("compositions validated non-empty");
        lines.push(serialize_chain(&chain, registry)?);
    }

    let mut seen = BTreeSet::new();
    let mut transformations = Vec::new();
    for comp in &spec.compositions {
        for t in comp {
            if seen.insert((t.tag.clone(), t.identity_key())) {
                transformations.push(ManifestTransform::from(t));
            }
        }
    }

    let manifest = CorpusManifest {
        element_length: spec.element_length,
        alphabet: alphabet.iter().map(|a| a.symbol()).collect(),
        per_position_atoms: per_position
            .into_iter()
            .map(|set| set.into_iter().collect())
            .collect(),
        transformations,
        compositions: spec
            .compositions
            .iter()
            .map(|comp| comp.iter().map(|t| t.tag.clone()).collect())
            .collect(),
        step_counts: step_counts.into_iter().collect(),
        line_count: lines.len() as u64,
        seed: spec.subsample.map(|s| s.seed),
    };

    Ok((lines, manifest))
}

/// Write a corpus as UTF-8 text, one line per chain, LF terminators.
pub fn write_corpus(path: &Path, lines: &[ChainLine]) -> Result<(), CorpusError> {
    let io_err = |e| CorpusError::Io {
        path: path.display().to_string(),
        source: e,
    };
    let file = std::fs::File::create(path).map_err(io_err)?;
    let mut w = std::io::BufWriter::new(file);
    for line in lines {
        w.write_all(line.text().as_bytes()).map_err(io_err)?;
        w.write_all(b"\n").map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

/// Read a corpus file back into validated chain lines.
pub fn read_corpus(
    path: &Path,
    registry: &TransformationRegistry,
) -> Result<Vec<ChainLine>, CorpusError> {
    let io_err = |e| CorpusError::Io {
        path: path.display().to_string(),
        source: e,
    };
    let file = std::fs::File::open(path).map_err(io_err)?;
    let reader = std::io::BufReader::new(file);
    let mut out = Vec::new();
    for line in reader.lines() {
        let text = line.map_err(io_err)?;
        if text.is_empty() {
            continue;
        }
        out.push(line_from_text(&text, registry)?);
    }
    Ok(out)
}

/// Parse and re-serialize a raw line, recovering its spans. The two text
/// forms must agree byte-for-byte; the grammar admits no non-canonical
/// spellings.
pub fn line_from_text(
    text: &str,
    registry: &TransformationRegistry,
) -> Result<ChainLine, CorpusError> {
    let chain = parse_line(text, registry)?;
    let line = serialize_chain(&chain, registry)?;
    debug_assert_eq!(line.text(), text);
    Ok(line)
}
