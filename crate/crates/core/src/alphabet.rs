//! Letters, signed letters and words over a doubled alphabet.
//!
//! Every generator `x` has a formal inverse written `x'`. Signed letters are
//! numbered so that `x` sits immediately before `x'`; that order is the one
//! used everywhere a canonical traversal is needed.

use std::fmt;
use thiserror::Error;

/// Index of a generator in an [`Alphabet`].
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Letter(pub u16);

/// A generator or its formal inverse, encoded as `2*letter + sign`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct SLetter(u16);

impl SLetter {
    pub fn pos(l: Letter) -> Self {
        SLetter(l.0 * 2)
    }

    pub fn neg(l: Letter) -> Self {
        SLetter(l.0 * 2 + 1)
    }

    pub fn letter(self) -> Letter {
        Letter(self.0 / 2)
    }

    pub fn is_positive(self) -> bool {
        self.0 % 2 == 0
    }

    /// `x` <-> `x'`.
    pub fn inverse(self) -> Self {
        SLetter(self.0 ^ 1)
    }

    pub fn code(self) -> usize {
        self.0 as usize
    }

    pub fn from_code(code: usize) -> Self {
        debug_assert!(code <= u16::MAX as usize);
        SLetter(code as u16)
    }
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum AlphabetError {
    #[error("letter name {0:?} is not a valid identifier")]
    BadName(String),
    #[error("duplicate letter name {0:?}")]
    Duplicate(String),
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("unknown letter {0:?}")]
    UnknownLetter(String),
}

/// A finite ordered set of named generators.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Alphabet {
    names: Vec<String>,
}

/// Names may be any whitespace-free token that does not collide with the
/// word syntax: no `#`, not `=`, and no trailing `'` (reserved for inverses).
pub fn valid_letter_name(name: &str) -> bool {
    !name.is_empty()
        && name != "="
        && !name.ends_with('\'')
        && !name.contains('#')
        && !name.chars().any(char::is_whitespace)
}

impl Alphabet {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self, AlphabetError> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        for (i, n) in names.iter().enumerate() {
            if !valid_letter_name(n) {
                return Err(AlphabetError::BadName(n.clone()));
            }
            if names[..i].contains(n) {
                return Err(AlphabetError::Duplicate(n.clone()));
            }
        }
        Ok(Alphabet { names })
    }

    /// Number of generators (the doubled alphabet has twice as many letters).
    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn signed_len(&self) -> usize {
        self.names.len() * 2
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        (0..self.names.len() as u16).map(Letter)
    }

    pub fn name(&self, l: Letter) -> &str {
        &self.names[l.0 as usize]
    }

    pub fn index_of(&self, name: &str) -> Option<Letter> {
        self.names.iter().position(|n| n == name).map(|i| Letter(i as u16))
    }

    pub fn display_sletter(&self, s: SLetter) -> String {
        if s.is_positive() {
            self.name(s.letter()).to_string()
        } else {
            format!("{}'", self.name(s.letter()))
        }
    }

    fn parse_sletter(&self, token: &str) -> Result<SLetter, WordError> {
        if let Some(base) = token.strip_suffix('\'') {
            match self.index_of(base) {
                Some(l) => Ok(SLetter::neg(l)),
                None => Err(WordError::UnknownLetter(token.to_string())),
            }
        } else {
            match self.index_of(token) {
                Some(l) => Ok(SLetter::pos(l)),
                None => Err(WordError::UnknownLetter(token.to_string())),
            }
        }
    }

    /// Parses a whitespace-separated word such as `t' a t b'`.
    pub fn parse_word(&self, text: &str) -> Result<Word, WordError> {
        let mut letters = Vec::new();
        for token in text.split_whitespace() {
            letters.push(self.parse_sletter(token)?);
        }
        Ok(Word(letters))
    }

    pub fn display_word(&self, w: &[SLetter]) -> String {
        w.iter().map(|&s| self.display_sletter(s)).collect::<Vec<_>>().join(" ")
    }
}

/// A word over a doubled alphabet.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Word(pub Vec<SLetter>);

impl Word {
    pub fn new(letters: Vec<SLetter>) -> Self {
        Word(letters)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[SLetter] {
        &self.0
    }

    /// `(uv)' = v'u'`: reverse the word and flip every sign.
    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|s| s.inverse()).collect())
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.0.clone();
        letters.extend_from_slice(&other.0);
        Word(letters)
    }

    pub fn push(&mut self, s: SLetter) {
        self.0.push(s);
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}
