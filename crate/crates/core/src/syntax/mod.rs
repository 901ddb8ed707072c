//! Surface syntax: programs, DL knowledge bases, hybrid KB files with
//! `%% DL` / `%% LP` sections, and the model-file format.

mod kb;
mod lexer;
mod model;
mod program;

use std::fmt;

pub use kb::{parse_concept, parse_kb};
pub use model::{parse_model, ModelFile};
pub use program::{parse_program, parse_rule};

use crate::dl::DlKb;
use crate::logic::Program;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
    pub expected: Vec<String>,
}

impl ParseError {
    pub fn new(line: usize, col: usize, message: impl Into<String>, expected: Vec<String>) -> Self {
        ParseError {
            line,
            col,
            message: message.into(),
            expected,
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.message)?;
        if !self.expected.is_empty() {
            write!(f, " (expected {})", self.expected.join(" or "))?;
        }
        Ok(())
    }
}

/// Splits a hybrid KB file into its DL and LP sections. Lines of the other
/// section are blanked so error positions refer to the original file. A file
/// without markers is a program with an empty DL part.
pub fn split_sections(src: &str) -> (String, String) {
    let mut dl = String::new();
    let mut lp = String::new();
    let mut in_dl = false;
    for line in src.lines() {
        let marker = line.trim_start().strip_prefix("%%").map(str::trim);
        match marker {
            Some(m) if m.eq_ignore_ascii_case("dl") => in_dl = true,
            Some(m) if m.eq_ignore_ascii_case("lp") => in_dl = false,
            _ => {
                let dst = if in_dl { &mut dl } else { &mut lp };
                dst.push_str(line);
            }
        }
        dl.push('\n');
        lp.push('\n');
    }
    (dl, lp)
}

pub fn parse_hybrid(src: &str) -> Result<(DlKb, Program), ParseError> {
    let (dl, lp) = split_sections(src);
    Ok((parse_kb(&dl)?, parse_program(&lp)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sections_keep_line_numbers() {
        let src = "%% DL\nconcept A.\n%% LP\nq(a) :- .\n";
        let e = parse_hybrid(src).unwrap_err();
        assert_eq!(e.line, 4);
    }

    #[test]
    fn unmarked_file_is_a_program() {
        let (kb, p) = parse_hybrid("q(a).").unwrap();
        assert!(kb.is_empty());
        assert_eq!(p.len(), 1);
    }
}
