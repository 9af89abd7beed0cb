use std::fmt;

use crate::units::Category;

use super::ShellError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParamKind {
    Str,
    Int,
    Double,
    Bool,
    Choice(&'static [&'static str]),
    /// A unit symbol of the category, e.g. `cm` for lengths.
    Unit(Category),
    /// Absorbs the rest of the line. Only valid as the last parameter.
    Text,
}

impl fmt::Display for ParamKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamKind::Str => f.write_str("string"),
            ParamKind::Int => f.write_str("int"),
            ParamKind::Double => f.write_str("double"),
            ParamKind::Bool => f.write_str("bool"),
            ParamKind::Choice(c) => write!(f, "one of {}", c.join("|")),
            ParamKind::Unit(c) => write!(f, "{} unit", c.name()),
            ParamKind::Text => f.write_str("text"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Param {
    pub name: &'static str,
    pub kind: ParamKind,
    /// `None` means the parameter must be given.
    pub default: Option<&'static str>,
}

impl Param {
    pub fn required(name: &'static str, kind: ParamKind) -> Self {
        Self { name, kind, default: None }
    }

    pub fn optional(name: &'static str, kind: ParamKind, default: &'static str) -> Self {
        Self { name, kind, default: Some(default) }
    }

    pub fn omittable(&self) -> bool {
        self.default.is_some()
    }
}

/// A command split into its path and raw argument tokens.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommandLine {
    pub path: String,
    pub args: Vec<String>,
    /// Set when the last argument is trailing text rather than a token.
    pub trailing_text: bool,
}

impl CommandLine {
    /// Renders the command back to a line that parses to an equal value.
    pub fn unparse(&self) -> String {
        let mut out = self.path.clone();
        let n = self.args.len();
        for (i, a) in self.args.iter().enumerate() {
            out.push(' ');
            if self.trailing_text && i + 1 == n {
                out.push_str(a);
            } else {
                out.push_str(&quote(a));
            }
        }
        out
    }
}

fn quote(token: &str) -> String {
    if token.is_empty() || token.chars().any(|c| c.is_whitespace() || c == '"' || c == '#') {
        format!("\"{}\"", token.replace('"', "'"))
    } else {
        token.to_string()
    }
}

/// Removes a comment: `#` at the start of the line or after whitespace,
/// outside double quotes.
pub fn strip_comment(line: &str) -> &str {
    let mut in_quotes = false;
    let mut prev_ws = true;
    for (i, c) in line.char_indices() {
        match c {
            '"' => in_quotes = !in_quotes,
            '#' if !in_quotes && prev_ws => return &line[..i],
            _ => {}
        }
        prev_ws = c.is_whitespace();
    }
    line
}

/// Takes the next token off `rest`, honouring double quotes.
fn next_token(rest: &str) -> Option<(String, &str)> {
    let rest = rest.trim_start();
    if rest.is_empty() {
        return None;
    }
    if let Some(body) = rest.strip_prefix('"') {
        return Some(match body.find('"') {
            Some(end) => (body[..end].to_string(), &body[end + 1..]),
            None => (body.to_string(), ""),
        });
    }
    let end = rest.find(char::is_whitespace).unwrap_or(rest.len());
    Some((rest[..end].to_string(), &rest[end..]))
}

/// First whitespace-separated token of a line with the comment removed.
pub fn command_path(line: &str) -> Option<&str> {
    strip_comment(line).split_whitespace().next()
}

/// Splits the arguments after the path according to `params`. A trailing
/// text parameter takes the rest of the line verbatim (trimmed).
pub fn split_args(path: &str, rest: &str, params: &[Param]) -> Result<CommandLine, ShellError> {
    let mut args = Vec::new();
    let mut rest = rest;
    let mut trailing_text = false;
    for p in params {
        if p.kind == ParamKind::Text {
            let t = rest.trim();
            if !t.is_empty() {
                args.push(t.to_string());
                trailing_text = true;
            }
            rest = "";
            break;
        }
        match next_token(rest) {
            Some((tok, r)) => {
                args.push(tok);
                rest = r;
            }
            None => break,
        }
    }
    if next_token(rest).is_some() {
        let extra = rest.split_whitespace().count();
        return Err(ShellError::Arity { path: path.to_string(), max: params.len(), got: params.len() + extra });
    }
    Ok(CommandLine { path: path.to_string(), args, trailing_text })
}

/// A converted argument.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Str(String),
    Int(i64),
    Double(f64),
    Bool(bool),
    /// Multiplier to internal units and the symbol as written.
    Unit(f64, String),
}

pub fn parse_bool(s: &str) -> Option<bool> {
    match s.to_ascii_lowercase().as_str() {
        "true" | "1" | "yes" | "on" | "t" | "y" => Some(true),
        "false" | "0" | "no" | "off" | "f" | "n" => Some(false),
        _ => None,
    }
}

fn convert(p: &Param, token: &str) -> Result<Value, ShellError> {
    let bad = || ShellError::BadValue { param: p.name.to_string(), kind: p.kind.to_string(), token: token.to_string() };
    Ok(match p.kind {
        ParamKind::Str | ParamKind::Text => Value::Str(token.to_string()),
        ParamKind::Int => Value::Int(token.parse().map_err(|_| bad())?),
        ParamKind::Double => {
            let v: f64 = token.parse().map_err(|_| bad())?;
            if !v.is_finite() {
                return Err(bad());
            }
            Value::Double(v)
        }
        ParamKind::Bool => Value::Bool(parse_bool(token).ok_or_else(bad)?),
        ParamKind::Choice(choices) => {
            let c = choices.iter().find(|c| c.eq_ignore_ascii_case(token)).ok_or_else(bad)?;
            Value::Str(c.to_string())
        }
        ParamKind::Unit(cat) => match cat.parse_unit(token) {
            Some(f) => Value::Unit(f, token.to_string()),
            None => return Err(ShellError::BadUnit { token: token.to_string(), category: cat.name() }),
        },
    })
}

/// Arguments after default substitution and conversion.
#[derive(Clone, Debug, PartialEq)]
pub struct Args {
    values: Vec<(&'static str, Value)>,
    /// Parameters that were given explicitly (not omitted or `!`).
    given: Vec<&'static str>,
}

impl Args {
    /// Converts the tokens of `line`, filling omitted and `!` arguments from defaults.
    pub fn resolve(line: &CommandLine, params: &[Param]) -> Result<Self, ShellError> {
        let mut values = Vec::with_capacity(params.len());
        let mut given = Vec::new();
        for (i, p) in params.iter().enumerate() {
            let token = line.args.get(i).map(String::as_str);
            let explicit = token.filter(|t| *t != "!");
            let text = match (explicit, p.default) {
                (Some(t), _) => {
                    given.push(p.name);
                    t
                }
                (None, Some(d)) => d,
                (None, None) => {
                    return Err(ShellError::MissingParam { path: line.path.clone(), param: p.name.to_string() })
                }
            };
            values.push((p.name, convert(p, text)?));
        }
        Ok(Self { values, given })
    }

    fn get(&self, name: &str) -> &Value {
        &self.values.iter().find(|(n, _)| *n == name).unwrap_or_else(|| panic!("no parameter {name}")).1
    }

    pub fn was_given(&self, name: &str) -> bool {
        self.given.contains(&name)
    }

    pub fn str(&self, name: &str) -> &str {
        match self.get(name) {
            Value::Str(s) | Value::Unit(_, s) => s,
            other => panic!("parameter {name} is {other:?}"),
        }
    }

    pub fn int(&self, name: &str) -> i64 {
        match self.get(name) {
            Value::Int(v) => *v,
            other => panic!("parameter {name} is {other:?}"),
        }
    }

    pub fn f64(&self, name: &str) -> f64 {
        match self.get(name) {
            Value::Double(v) => *v,
            Value::Int(v) => *v as f64,
            other => panic!("parameter {name} is {other:?}"),
        }
    }

    pub fn bool(&self, name: &str) -> bool {
        match self.get(name) {
            Value::Bool(v) => *v,
            other => panic!("parameter {name} is {other:?}"),
        }
    }

    /// Multiplier of a unit parameter.
    pub fn unit(&self, name: &str) -> f64 {
        match self.get(name) {
            Value::Unit(f, _) => *f,
            other => panic!("parameter {name} is {other:?}"),
        }
    }
}
