//! Text normalization shared by the statistics, embedding and scoring passes.
//!
//! Tokenization rules: words are lowercased, punctuation characters become
//! single-character tokens, maximal ASCII digit runs collapse to the `DIGIT`
//! token, and sentence boundaries are marked with an `EOS` token when
//! requested.

use std::collections::HashSet;

pub const DIGIT_TOKEN: &str = "DIGIT";
pub const EOS_TOKEN: &str = "EOS";

/// Trailing words that suppress a sentence break at a following period.
const DEFAULT_ABBREVIATIONS: &[&str] = &[
    "e.g", "i.e", "al", "etc", "cf", "vs", "fig", "figs", "eq", "eqs", "sec", "tab", "no", "dr",
    "mr", "ms", "prof", "resp", "approx", "ca", "ref", "refs",
];

/// Rule-based sentence splitter: breaks on `.`, `!`, `?` followed by
/// whitespace, unless the period closes a known abbreviation.
#[derive(Debug, Clone)]
pub struct SentenceSplitter {
    abbreviations: HashSet<String>,
}

impl Default for SentenceSplitter {
    fn default() -> Self {
        SentenceSplitter {
            abbreviations: DEFAULT_ABBREVIATIONS
                .iter()
                .map(|s| s.to_string())
                .collect(),
        }
    }
}

impl SentenceSplitter {
    pub fn with_abbreviations<I: IntoIterator<Item = String>>(abbrevs: I) -> Self {
        SentenceSplitter {
            abbreviations: abbrevs.into_iter().map(|s| s.to_lowercase()).collect(),
        }
    }

    /// Split `text` into trimmed, non-empty sentences. Newlines are treated
    /// as hard boundaries.
    pub fn split(&self, text: &str) -> Vec<String> {
        let mut sentences = Vec::new();
        for line in text.split('\n') {
            self.split_line(line, &mut sentences);
        }
        sentences
    }

    fn split_line(&self, line: &str, out: &mut Vec<String>) {
        let chars: Vec<char> = line.chars().collect();
        let mut start = 0;
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            if c == '!' || c == '?' || (c == '.' && !self.guards_period(&chars[start..i])) {
                let next_ws = i + 1 >= chars.len() || chars[i + 1].is_whitespace();
                if next_ws {
                    let sentence: String = chars[start..=i].iter().collect();
                    let trimmed = sentence.trim();
                    if !trimmed.is_empty() {
                        out.push(trimmed.to_string());
                    }
                    start = i + 1;
                }
            }
            i += 1;
        }
        if start < chars.len() {
            let rest: String = chars[start..].iter().collect();
            let trimmed = rest.trim();
            if !trimmed.is_empty() {
                out.push(trimmed.to_string());
            }
        }
    }

    /// True when the word immediately before a period is an abbreviation or
    /// a single letter (initials).
    fn guards_period(&self, before: &[char]) -> bool {
        let word: String = before
            .iter()
            .rev()
            .take_while(|c| !c.is_whitespace())
            .collect::<Vec<_>>()
            .into_iter()
            .rev()
            .collect();
        let word = word.trim_matches(|c: char| c == '(' || c == ')' || c == '"' || c == '\'');
        if word.is_empty() {
            return false;
        }
        let lower = word.to_lowercase();
        if self.abbreviations.contains(&lower) {
            return true;
        }
        word.chars().count() == 1 && word.chars().all(|c| c.is_alphabetic())
    }
}

/// Tokenize one sentence: lowercased word tokens, `DIGIT` for digit runs,
/// single-character tokens for punctuation.
pub fn tokenize_sentence(sentence: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut word = String::new();
    let flush = |word: &mut String, tokens: &mut Vec<String>| {
        if !word.is_empty() {
            tokens.push(std::mem::take(word));
        }
    };
    let mut chars = sentence.chars().peekable();
    while let Some(c) = chars.next() {
        if c.is_alphabetic() {
            word.extend(c.to_lowercase());
        } else if c.is_ascii_digit() {
            flush(&mut word, &mut tokens);
            while chars.peek().is_some_and(|n| n.is_ascii_digit()) {
                chars.next();
            }
            tokens.push(DIGIT_TOKEN.to_string());
        } else if c.is_whitespace() {
            flush(&mut word, &mut tokens);
        } else {
            flush(&mut word, &mut tokens);
            tokens.push(c.to_string());
        }
    }
    flush(&mut word, &mut tokens);
    tokens
}

/// Tokenize running text without sentence markers.
pub fn tokenize_words(text: &str) -> Vec<String> {
    tokenize_sentence(text)
}

/// Tokenize running text, appending `EOS` after every sentence.
pub fn tokenize_with_eos(text: &str, splitter: &SentenceSplitter) -> Vec<String> {
    let mut tokens = Vec::new();
    for sentence in splitter.split(text) {
        tokens.extend(tokenize_sentence(&sentence));
        tokens.push(EOS_TOKEN.to_string());
    }
    tokens
}
