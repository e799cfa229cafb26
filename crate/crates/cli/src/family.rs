//! Parsing graph-family specs from command-line tokens.
//!
//! Grammar (prefix form, products nest):
//!   cycle <n> | complete <n> | hypercube <dim> | petersen
//!   | circulant <n> <s1,s2,...> | product <spec> <spec>

use netsum_core::graph::CayleySpec;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FamilyParseError {
    #[error("missing family name")]
    Empty,
    #[error("unknown family `{0}`")]
    UnknownFamily(String),
    #[error("{family}: missing argument `{what}`")]
    MissingArgument { family: String, what: String },
    #[error("{family}: invalid argument `{value}`")]
    InvalidArgument { family: String, value: String },
    #[error("unexpected trailing tokens starting at `{0}`")]
    TrailingTokens(String),
}

/// Parse a full token list; all tokens must be consumed.
pub fn parse_family(tokens: &[&str]) -> Result<CayleySpec, FamilyParseError> {
    let (spec, rest) = parse_prefix(tokens)?;
    if let Some(extra) = rest.first() {
        return Err(FamilyParseError::TrailingTokens((*extra).to_string()));
    }
    Ok(spec)
}

fn parse_prefix<'a>(tokens: &'a [&'a str]) -> Result<(CayleySpec, &'a [&'a str]), FamilyParseError> {
    let (head, rest) = tokens.split_first().ok_or(FamilyParseError::Empty)?;
    match *head {
        "cycle" => {
            let (n, rest) = take_number(head, "n", rest)?;
            Ok((CayleySpec::Cycle { n }, rest))
        }
        "complete" => {
            let (n, rest) = take_number(head, "n", rest)?;
            Ok((CayleySpec::Complete { n }, rest))
        }
        "hypercube" => {
            let (dim, rest) = take_number(head, "dimension", rest)?;
            Ok((CayleySpec::Hypercube { dim }, rest))
        }
        "petersen" => Ok((CayleySpec::Petersen, rest)),
        "circulant" => {
            let (n, rest) = take_number(head, "n", rest)?;
            let (raw, rest) = rest
                .split_first()
                .ok_or_else(|| missing(head, "connection set"))?;
            let connections = raw
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse::<usize>()
                        .map_err(|_| invalid(head, raw))
                })
                .collect::<Result<Vec<usize>, _>>()?;
            Ok((CayleySpec::Circulant { n, connections }, rest))
        }
        "product" => {
            let (first, rest) = parse_prefix(rest)?;
            let (second, rest) = parse_prefix(rest)?;
            Ok((CayleySpec::Product(Box::new(first), Box::new(second)), rest))
        }
        other => Err(FamilyParseError::UnknownFamily(other.to_string())),
    }
}

fn take_number<'a>(
    family: &str,
    what: &str,
    tokens: &'a [&'a str],
) -> Result<(usize, &'a [&'a str]), FamilyParseError> {
    let (raw, rest) = tokens.split_first().ok_or_else(|| missing(family, what))?;
    let value = raw.parse::<usize>().map_err(|_| invalid(family, raw))?;
    Ok((value, rest))
}

fn missing(family: &str, what: &str) -> FamilyParseError {
    FamilyParseError::MissingArgument {
        family: family.to_string(),
        what: what.to_string(),
    }
}

fn invalid(family: &str, value: &str) -> FamilyParseError {
    FamilyParseError::InvalidArgument {
        family: family.to_string(),
        value: value.to_string(),
    }
}

/// Parse a whitespace-separated spec string.
pub fn parse_family_str(s: &str) -> Result<CayleySpec, FamilyParseError> {
    let tokens: Vec<&str> = s.split_whitespace().collect();
    parse_family(&tokens)
}
