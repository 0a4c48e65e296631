//! Finite presentations `Inv<X | u_i = v_i>` and their text format.
//!
//! ```text
//! # lines starting with # are comments
//! letters x t
//! rel x t = t x   # tag c
//! rel x x = x
//! ```
//!
//! One `letters` line, then `rel` lines. Signed letters are written `x` and
//! `x'`. A relation may carry a one-character family tag used to select
//! relation subsets (for example during targeted saturation).

use crate::alphabet::{Alphabet, AlphabetError, Word, WordError};
use std::fmt;
use thiserror::Error;

/// One-character label grouping relations by the role they play.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum FamilyTag {
    /// letter-commutation relations, written `c`
    Commuting,
    /// counter-test relations, written `t`
    Test,
    /// increment relations, written `w`
    Writing,
    /// decrement relations, written `e`
    Erasing,
    /// absorbing-element relations, written `f`
    Finiteness,
    /// relations joining the two halves of an amalgam, written `3`
    Amalgam,
}

impl FamilyTag {
    pub fn as_char(self) -> char {
        match self {
            FamilyTag::Commuting => 'c',
            FamilyTag::Test => 't',
            FamilyTag::Writing => 'w',
            FamilyTag::Erasing => 'e',
            FamilyTag::Finiteness => 'f',
            FamilyTag::Amalgam => '3',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        Some(match c {
            'c' => FamilyTag::Commuting,
            't' => FamilyTag::Test,
            'w' => FamilyTag::Writing,
            'e' => FamilyTag::Erasing,
            'f' => FamilyTag::Finiteness,
            '3' => FamilyTag::Amalgam,
            _ => return None,
        })
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Relation {
    pub lhs: Word,
    pub rhs: Word,
    pub tag: Option<FamilyTag>,
}

#[derive(Clone, Debug)]
pub struct Presentation {
    pub alphabet: Alphabet,
    pub relations: Vec<Relation>,
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    #[error("expected a `letters` line first")]
    MissingLetters,
    #[error("duplicate `letters` line")]
    DuplicateLetters,
    #[error("{0}")]
    BadAlphabet(#[from] AlphabetError),
    #[error("{0}")]
    BadWord(#[from] WordError),
    #[error("relation must contain exactly one `=`")]
    MissingEquals,
    #[error("relation side is empty")]
    EmptySide,
    #[error("unknown family tag {0:?}")]
    BadTag(String),
    #[error("unrecognized directive {0:?}")]
    BadDirective(String),
}

impl Presentation {
    pub fn new(alphabet: Alphabet, relations: Vec<Relation>) -> Self {
        Presentation { alphabet, relations }
    }

    /// Indices of relations whose tag is in `tags`.
    pub fn indices_with_tags(&self, tags: &[FamilyTag]) -> Vec<usize> {
        self.relations
            .iter()
            .enumerate()
            .filter(|(_, r)| r.tag.map_or(false, |t| tags.contains(&t)))
            .map(|(i, _)| i)
            .collect()
    }

    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut alphabet: Option<Alphabet> = None;
        let mut relations = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let at = |kind: ParseErrorKind| ParseError { line, kind };
            let (content, comment) = match raw.find('#') {
                Some(p) => (&raw[..p], Some(raw[p + 1..].trim())),
                None => (raw, None),
            };
            let content = content.trim();
            if content.is_empty() {
                continue;
            }
            let mut parts = content.split_whitespace();
            let head = parts.next().unwrap();
            match head {
                "letters" => {
                    if alphabet.is_some() {
                        return Err(at(ParseErrorKind::DuplicateLetters));
                    }
                    alphabet =
                        Some(Alphabet::new(parts).map_err(|e| at(ParseErrorKind::BadAlphabet(e)))?);
                }
                "rel" => {
                    let al = alphabet.as_ref().ok_or_else(|| at(ParseErrorKind::MissingLetters))?;
                    let rest: Vec<&str> = parts.collect();
                    let eqs: Vec<usize> =
                        rest.iter().enumerate().filter(|(_, t)| **t == "=").map(|(p, _)| p).collect();
                    if eqs.len() != 1 {
                        return Err(at(ParseErrorKind::MissingEquals));
                    }
                    let (l, r) = rest.split_at(eqs[0]);
                    let r = &r[1..];
                    if l.is_empty() || r.is_empty() {
                        return Err(at(ParseErrorKind::EmptySide));
                    }
                    let side = |toks: &[&str]| -> Result<Word, ParseError> {
                        al.parse_word(&toks.join(" "))
                            .map_err(|e| at(ParseErrorKind::BadWord(e)))
                    };
                    let tag = match comment {
                        Some(c) if c == "tag" || c.starts_with("tag ") => {
                            let name = c["tag".len()..].trim();
                            let mut chars = name.chars();
                            match (chars.next().and_then(FamilyTag::from_char), chars.next()) {
                                (Some(t), None) => Some(t),
                                _ => return Err(at(ParseErrorKind::BadTag(name.to_string()))),
                            }
                        }
                        _ => None,
                    };
                    relations.push(Relation { lhs: side(l)?, rhs: side(r)?, tag });
                }
                other => return Err(at(ParseErrorKind::BadDirective(other.to_string()))),
            }
        }
        let alphabet = alphabet.ok_or(ParseError { line: 0, kind: ParseErrorKind::MissingLetters })?;
        Ok(Presentation { alphabet, relations })
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "letters")?;
        for l in self.alphabet.letters() {
            write!(f, " {}", self.alphabet.name(l))?;
        }
        writeln!(f)?;
        for r in &self.relations {
            write!(
                f,
                "rel {} = {}",
                self.alphabet.display_word(r.lhs.letters()),
                self.alphabet.display_word(r.rhs.letters())
            )?;
            if let Some(t) = r.tag {
                write!(f, "  # tag {}", t.as_char())?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
