//! One-line text serialization of reasoning chains and its strict inverse.
//!
//! Single-step layout: query atoms, the tag, `<answer>`, answer atoms.
//! Multi-step layout: query atoms, all k tags, `<think>`, then each
//! intermediate followed by the tags still to be applied, then `<answer>`
//! and the answer atoms. Tokens are separated by single spaces.

use std::ops::Range;

use thiserror::Error;

use crate::element::{Atom, Element};
use crate::transform::{ReasoningChain, Transformation, TransformationRegistry};

pub const THINK_MARKER: &str = "<think>";
pub const ANSWER_MARKER: &str = "<answer>";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LineError {
    #[error("transformation {0:?} is not in the registry")]
    UnknownTransformation(String),
    #[error("malformed line: {0}")]
    Malformed(String),
    #[error("inconsistent line: {0}")]
    Inconsistent(String),
}

impl LineError {
    pub fn is_malformed(&self) -> bool {
        matches!(self, LineError::Malformed(_))
    }

    pub fn is_inconsistent(&self) -> bool {
        matches!(self, LineError::Inconsistent(_))
    }
}

/// A serialized chain plus the token spans of its prompt, reasoning, and
/// answer portions. The prompt covers the query atoms, the transformation
/// tags, and the trailing marker (`<think>` for multi-step, `<answer>` for
/// single-step); the reasoning span is empty exactly when k = 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainLine {
    text: String,
    prompt_span: Range<usize>,
    reason_span: Range<usize>,
    answer_span: Range<usize>,
}

impl ChainLine {
    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn prompt_span(&self) -> Range<usize> {
        self.prompt_span.clone()
    }

    pub fn reason_span(&self) -> Range<usize> {
        self.reason_span.clone()
    }

    pub fn answer_span(&self) -> Range<usize> {
        self.answer_span.clone()
    }

    pub fn tokens(&self) -> Vec<&str> {
        self.text.split(' ').collect()
    }

    pub fn prompt_tokens(&self) -> Vec<&str> {
        self.slice(&self.prompt_span)
    }

    pub fn reason_tokens(&self) -> Vec<&str> {
        self.slice(&self.reason_span)
    }

    pub fn answer_tokens(&self) -> Vec<&str> {
        self.slice(&self.answer_span)
    }

    /// Everything after the prompt: the gold completion the model is scored
    /// against (reasoning, answer marker, and answer for multi-step lines;
    /// just the answer for single-step lines).
    pub fn continuation_tokens(&self) -> Vec<&str> {
        let toks = self.tokens();
        toks[self.prompt_span.end..].to_vec()
    }

    pub fn prompt_text(&self) -> String {
        self.prompt_tokens().join(" ")
    }

    fn slice(&self, span: &Range<usize>) -> Vec<&str> {
        let toks = self.tokens();
        toks[span.clone()].to_vec()
    }
}

/// Serialize a chain using the registry's tags.
pub fn serialize_chain(
    chain: &ReasoningChain,
    registry: &TransformationRegistry,
) -> Result<ChainLine, LineError> {
    for op in chain.ops() {
        match registry.by_tag(&op.tag) {
            Some(entry) if entry.identity_key() == op.identity_key() => {}
            _ => return Err(LineError::UnknownTransformation(op.tag.clone())),
        }
    }

    let k = chain.steps();
    let l = chain.query().len();
    let mut tokens: Vec<String> = Vec::with_capacity(2 * l + 2 * k + 2);

    push_atoms(&mut tokens, chain.query());
    for op in chain.ops() {
        tokens.push(op.tag.clone());
    }
    let marker = if k == 1 { ANSWER_MARKER } else { THINK_MARKER };
    tokens.push(marker.to_string());
    let prompt_span = 0..tokens.len();

    if k >= 2 {
        for (i, inter) in chain.intermediates().iter().enumerate() {
            push_atoms(&mut tokens, inter);
            for op in &chain.ops()[i + 1..] {
                tokens.push(op.tag.clone());
            }
        }
        let reason_span = prompt_span.end..tokens.len();
        tokens.push(ANSWER_MARKER.to_string());
        let answer_start = tokens.len();
        push_atoms(&mut tokens, chain.answer());
        return Ok(ChainLine {
            text: tokens.join(" "),
            prompt_span,
            reason_span,
            answer_span: answer_start..tokens.len(),
        });
    }

    let answer_start = tokens.len();
    push_atoms(&mut tokens, chain.answer());
    Ok(ChainLine {
        text: tokens.join(" "),
        reason_span: prompt_span.end..prompt_span.end,
        prompt_span,
        answer_span: answer_start..tokens.len(),
    })
}

fn push_atoms(tokens: &mut Vec<String>, e: &Element) {
    for a in e.atoms() {
        tokens.push(a.symbol().to_string());
    }
}

fn token_atom(tok: &str) -> Option<Atom> {
    let mut chars = tok.chars();
    match (chars.next(), chars.next()) {
        (Some(c), None) => Atom::from_symbol(c).ok(),
        _ => None,
    }
}

/// Parse a serialized line back into a chain, validating both the grammar
/// (MALFORMED) and that the recorded steps actually replay (INCONSISTENT).
pub fn parse_line(
    text: &str,
    registry: &TransformationRegistry,
) -> Result<ReasoningChain, LineError> {
    let tokens: Vec<&str> = text.split(' ').collect();
    if tokens.iter().any(|t| t.is_empty()) {
        return Err(LineError::Malformed(
            "tokens must be separated by single spaces".into(),
        ));
    }
    let mut pos = 0usize;

    let query = read_atoms_while(&tokens, &mut pos);
    let query = Element::new(query)
        .map_err(|_| LineError::Malformed("line must start with query atoms".into()))?;
    let l = query.len();

    let mut ops: Vec<Transformation> = Vec::new();
    while pos < tokens.len() && tokens[pos] != THINK_MARKER && tokens[pos] != ANSWER_MARKER {
        match registry.by_tag(tokens[pos]) {
            Some(t) => ops.push(t.clone()),
            None => {
                return Err(LineError::Malformed(format!(
                    "unknown tag {:?}",
                    tokens[pos]
                )))
            }
        }
        pos += 1;
    }
    if ops.is_empty() {
        return Err(LineError::Malformed(
            "expected at least one transformation tag after the query".into(),
        ));
    }
    let k = ops.len();

    let marker = tokens
        .get(pos)
        .ok_or_else(|| LineError::Malformed("line ends before its marker".into()))?;
    let mut intermediates: Vec<Element> = Vec::new();

    match (*marker, k) {
        (ANSWER_MARKER, 1) => pos += 1,
        (ANSWER_MARKER, _) => {
            return Err(LineError::Malformed(
                "multi-step lines must use <think> before intermediates".into(),
            ))
        }
        (THINK_MARKER, 1) => {
            return Err(LineError::Malformed(
                "single-step lines must not contain <think>".into(),
            ))
        }
        (THINK_MARKER, _) => {
            pos += 1;
            for i in 1..k {
                let inter = read_exact_atoms(&tokens, &mut pos, l)
                    .ok_or_else(|| malformed_intermediate(i))?;
                intermediates.push(inter);
                for op in &ops[i..] {
                    if tokens.get(pos) != Some(&op.tag.as_str()) {
                        return Err(LineError::Malformed(format!(
                            "intermediate {i} must be followed by the remaining tags"
                        )));
                    }
                    pos += 1;
                }
            }
            if tokens.get(pos) != Some(&ANSWER_MARKER) {
                return Err(LineError::Malformed(
                    "expected <answer> after the reasoning steps".into(),
                ));
            }
            pos += 1;
        }
        _ => unreachable!(),
    }

    let answer = read_exact_atoms(&tokens, &mut pos, l)
        .ok_or_else(|| LineError::Malformed(format!("expected {l} answer atoms")))?;
    if pos != tokens.len() {
        return Err(LineError::Malformed(format!(
            "trailing tokens after the answer: {:?}",
            &tokens[pos..]
        )));
    }

    let chain = ReasoningChain::from_parts_unchecked(query, ops, intermediates, answer);
    if !chain.replays() {
        return Err(LineError::Inconsistent(
            "recorded steps do not follow from applying the transformations".into(),
        ));
    }
    Ok(chain)
}

fn malformed_intermediate(i: usize) -> LineError {
    LineError::Malformed(format!("intermediate {i} must repeat the query length"))
}

fn read_atoms_while(tokens: &[&str], pos: &mut usize) -> Vec<Atom> {
    let mut out = Vec::new();
    while *pos < tokens.len() {
        match token_atom(tokens[*pos]) {
            Some(a) => {
                out.push(a);
                *pos += 1;
            }
            None => break,
        }
    }
    out
}

fn read_exact_atoms(tokens: &[&str], pos: &mut usize, l: usize) -> Option<Element> {
    let mut out = Vec::with_capacity(l);
    for _ in 0..l {
        let a = token_atom(tokens.get(*pos)?)?;
        out.push(a);
        *pos += 1;
    }
    Element::new(out).ok()
}
