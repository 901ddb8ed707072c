use std::collections::BTreeMap;
use std::fmt;

use super::lexer::{Cursor, Tok};
use super::program::atom;
use super::ParseError;
use crate::logic::{is_plain_ident, Term};

/// A serialized interpretation `(U, I, M)`, one item per line:
///
/// ```text
/// domain:
/// john
/// wine
/// sigma:
/// john = john
/// nominals:
/// wine = wine
/// extensions:
/// drinks(john,john,wine)
/// "top/3"(john,john,wine)
/// atoms:
/// problematic(john)
/// ```
///
/// Names are kept as written; resolving them against a KB happens in
/// [`crate::hybrid::HybridInterpretation::from_model_file`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ModelFile {
    pub domain: Vec<String>,
    pub sigma: BTreeMap<String, String>,
    pub nominals: BTreeMap<String, String>,
    pub extensions: Vec<(String, Vec<String>)>,
    pub atoms: Vec<(String, Vec<String>)>,
}

#[derive(Clone, Copy)]
enum Section {
    Domain,
    Sigma,
    Nominals,
    Extensions,
    Atoms,
}

pub fn parse_model(src: &str) -> Result<ModelFile, ParseError> {
    let mut out = ModelFile::default();
    let mut section = None;
    for (i, raw) in src.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('%').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let header = match line {
            "domain:" => Some(Section::Domain),
            "sigma:" => Some(Section::Sigma),
            "nominals:" => Some(Section::Nominals),
            "extensions:" => Some(Section::Extensions),
            "atoms:" => Some(Section::Atoms),
            _ => None,
        };
        if header.is_some() {
            section = header;
            continue;
        }
        let err = |msg: String| ParseError::new(line_no, 1, msg, vec![]);
        match section {
            None => {
                return Err(ParseError::new(
                    line_no,
                    1,
                    "item outside a section",
                    ["domain:", "sigma:", "nominals:", "extensions:", "atoms:"]
                        .iter()
                        .map(|s| s.to_string())
                        .collect(),
                ))
            }
            Some(Section::Domain) => {
                if !is_plain_ident(line) && !line.chars().all(|c| c.is_ascii_digit()) {
                    return Err(err(format!("invalid element name `{line}`")));
                }
                out.domain.push(line.to_owned());
            }
            Some(s @ (Section::Sigma | Section::Nominals)) => {
                let (c, e) = line
                    .split_once('=')
                    .ok_or_else(|| err(format!("expected `constant = element`, found `{line}`")))?;
                let map = if matches!(s, Section::Sigma) {
                    &mut out.sigma
                } else {
                    &mut out.nominals
                };
                if map.insert(c.trim().to_owned(), e.trim().to_owned()).is_some() {
                    return Err(err(format!("constant `{}` mapped twice", c.trim())));
                }
            }
            Some(s @ (Section::Extensions | Section::Atoms)) => {
                let item = ground_atom(line).map_err(|e| ParseError { line: line_no, ..e })?;
                if matches!(s, Section::Extensions) {
                    out.extensions.push(item);
                } else {
                    out.atoms.push(item);
                }
            }
        }
    }
    Ok(out)
}

fn ground_atom(line: &str) -> Result<(String, Vec<String>), ParseError> {
    let mut cur = Cursor::new(line)?;
    let a = atom(&mut cur)?;
    if !cur.at_eof() {
        return Err(cur.unexpected(&[&Tok::Eof.describe()]));
    }
    let args = a
        .args
        .into_iter()
        .map(|t| match t {
            Term::Const(s) | Term::Var(s) => s,
            Term::Elem(e) => format!("#{}", e.0),
        })
        .collect();
    Ok((a.pred.name().unwrap_or("=").to_owned(), args))
}

fn write_item(f: &mut fmt::Formatter<'_>, pred: &str, args: &[String]) -> fmt::Result {
    if is_plain_ident(pred) {
        f.write_str(pred)?;
    } else {
        write!(f, "\"{pred}\"")?;
    }
    if !args.is_empty() {
        write!(f, "({})", args.join(","))?;
    }
    writeln!(f)
}

impl fmt::Display for ModelFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "domain:")?;
        for d in &self.domain {
            writeln!(f, "{d}")?;
        }
        writeln!(f, "sigma:")?;
        for (c, e) in &self.sigma {
            writeln!(f, "{c} = {e}")?;
        }
        if !self.nominals.is_empty() {
            writeln!(f, "nominals:")?;
            for (c, e) in &self.nominals {
                writeln!(f, "{c} = {e}")?;
            }
        }
        if !self.extensions.is_empty() {
            writeln!(f, "extensions:")?;
            for (p, args) in &self.extensions {
                write_item(f, p, args)?;
            }
        }
        writeln!(f, "atoms:")?;
        for (p, args) in &self.atoms {
            write_item(f, p, args)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let src = "domain:\njohn\nx\nsigma:\njohn = john\nnominals:\nwine = x\nextensions:\ndrinks(john,x,x)\n\"top/3\"(john,x,x)\natoms:\np(john)\n";
        let m = parse_model(src).unwrap();
        assert_eq!(m.domain, ["john", "x"]);
        assert_eq!(m.extensions[1].0, "top/3");
        assert_eq!(m.to_string(), src);
        assert_eq!(parse_model(&m.to_string()).unwrap(), m);
    }

    #[test]
    fn item_outside_section() {
        assert!(parse_model("john\n").is_err());
    }
}
