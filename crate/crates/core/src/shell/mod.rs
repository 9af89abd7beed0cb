//! The `/vis/...` command language: parsing, the command tree, macros and help.

mod commands;
mod parse;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::geometry::PathElement;
use crate::kernel::{KernelError, Verbosity, VisManager};

pub use parse::{command_path, parse_bool, split_args, strip_comment, Args, CommandLine, Param, ParamKind, Value};

/// Deepest allowed nesting of `/control/execute`.
pub const MAX_MACRO_DEPTH: usize = 8;

#[derive(Debug, Error)]
pub enum ShellError {
    #[error("command \"{path}\" not found{}", suggestion.as_ref().map(|s| format!("; did you mean \"{s}\"?")).unwrap_or_default())]
    UnknownCommand { path: String, suggestion: Option<String> },
    #[error("\"{0}\" is a command directory; try \"help {0}\"")]
    Directory(String),
    #[error("{path}: too many arguments (at most {max}, got {got})")]
    Arity { path: String, max: usize, got: usize },
    #[error("{path}: parameter \"{param}\" is required")]
    MissingParam { path: String, param: String },
    #[error("parameter \"{param}\" expects {kind}, got \"{token}\"")]
    BadValue { param: String, kind: String, token: String },
    #[error("\"{token}\" is not a {category} unit")]
    BadUnit { token: String, category: &'static str },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error("{file}:{line}: {source}")]
    Macro { file: String, line: usize, source: Box<ShellError> },
    #[error("macro nesting deeper than {MAX_MACRO_DEPTH}")]
    MacroDepth,
    #[error("cannot read macro {path}: {source}")]
    MacroRead { path: PathBuf, source: std::io::Error },
}

/// Successful result of one command.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    /// Blank line or comment.
    NoOp,
    Done,
    /// Executed (or deliberately skipped) with a caveat.
    Warning(String),
}

pub type Handler = fn(&mut Shell, &Invocation) -> Result<Outcome, ShellError>;

#[derive(Clone)]
pub struct Command {
    pub path: String,
    pub guidance: String,
    pub params: Vec<Param>,
    pub handler: Handler,
}

/// A resolved command ready for its handler.
pub struct Invocation {
    pub path: String,
    pub args: Args,
}

impl Invocation {
    /// Path segment `i` (0 is the first after the leading slash).
    pub fn segment(&self, i: usize) -> &str {
        self.path.split('/').filter(|s| !s.is_empty()).nth(i).unwrap_or("")
    }
}

/// Interactive command interpreter over a [`VisManager`].
pub struct Shell {
    pub vis: VisManager,
    commands: BTreeMap<String, Command>,
    depth: usize,
    /// Touchable selected by `/vis/set/touchable`.
    pub touchable: Option<Vec<PathElement>>,
    printout: Vec<String>,
    pub errors: usize,
    pub warnings: usize,
}

impl Shell {
    pub fn new(vis: VisManager) -> Self {
        let mut s = Self {
            vis,
            commands: BTreeMap::new(),
            depth: 0,
            touchable: None,
            printout: Vec::new(),
            errors: 0,
            warnings: 0,
        };
        commands::register_builtin(&mut s);
        s
    }

    pub fn add_command(&mut self, path: &str, guidance: &str, params: Vec<Param>, handler: Handler) {
        debug_assert!(
            params.windows(2).all(|w| !w[0].omittable() || w[1].omittable()),
            "{path}: required parameter after an optional one"
        );
        debug_assert!(params.iter().rev().skip(1).all(|p| p.kind != ParamKind::Text));
        self.commands.insert(
            path.to_string(),
            Command { path: path.to_string(), guidance: guidance.to_string(), params, handler },
        );
    }

    pub fn command(&self, path: &str) -> Option<&Command> {
        self.commands.get(path)
    }

    pub fn command_paths(&self) -> impl Iterator<Item = &str> {
        self.commands.keys().map(String::as_str)
    }

    /// Lines to show the user: command output, gated kernel messages and
    /// driver text, in order.
    pub fn take_printout(&mut self) -> Vec<String> {
        self.collect_kernel_output();
        std::mem::take(&mut self.printout)
    }

    pub fn print(&mut self, text: impl Into<String>) {
        self.printout.push(text.into());
    }

    fn collect_kernel_output(&mut self) {
        for (_, m) in self.vis.take_messages() {
            self.printout.push(m);
        }
        let out = self.vis.take_output();
        if !out.is_empty() {
            self.printout.push(out.trim_end().to_string());
        }
    }

    fn lookup(&self, path: &str) -> Result<&Command, ShellError> {
        if let Some(c) = self.commands.get(path) {
            return Ok(c);
        }
        let dir = if path.ends_with('/') { path.to_string() } else { format!("{path}/") };
        if self.commands.keys().any(|k| k.starts_with(&dir)) {
            return Err(ShellError::Directory(path.to_string()));
        }
        let mut hits = self.commands.keys().filter(|k| k.starts_with(path));
        if let (Some(only), None) = (hits.next(), hits.next()) {
            return Ok(&self.commands[only]);
        }
        Err(ShellError::UnknownCommand { path: path.to_string(), suggestion: self.suggest(path) })
    }

    /// Closest command or directory path by edit distance.
    fn suggest(&self, path: &str) -> Option<String> {
        let mut candidates: Vec<String> = self.commands.keys().cloned().collect();
        for k in self.commands.keys() {
            let mut d = String::new();
            for seg in k.split('/').filter(|s| !s.is_empty()) {
                d.push('/');
                d.push_str(seg);
                if d.len() < k.len() {
                    candidates.push(format!("{d}/"));
                }
            }
        }
        candidates
            .into_iter()
            .map(|c| (strsim::levenshtein(path, &c), c))
            .min()
            .filter(|(d, _)| *d <= path.len().max(4) / 2)
            .map(|(_, c)| c)
    }

    /// Splits `line` into a command and its argument tokens. Blank lines and
    /// comments give `None`.
    pub fn parse(&self, line: &str) -> Result<Option<CommandLine>, ShellError> {
        let body = strip_comment(line).trim();
        let Some(path) = body.split_whitespace().next() else { return Ok(None) };
        let cmd = self.lookup(path)?;
        let rest = &body[path.len()..];
        split_args(&cmd.path, rest, &cmd.params).map(Some)
    }

    /// Executes one line. `help [prefix]` is understood as well as commands.
    pub fn execute(&mut self, line: &str) -> Result<Outcome, ShellError> {
        let r = self.execute_inner(line);
        match &r {
            Ok(Outcome::Warning(w)) => {
                self.warnings += 1;
                if self.vis.verbosity() >= Verbosity::Warnings {
                    self.printout.push(format!("WARNING: {w}"));
                }
            }
            Err(_) if self.depth == 0 => self.errors += 1,
            _ => {}
        }
        self.collect_kernel_output();
        r
    }

    fn execute_inner(&mut self, line: &str) -> Result<Outcome, ShellError> {
        let body = strip_comment(line).trim();
        if let Some(rest) = body.strip_prefix("help").filter(|r| r.is_empty() || r.starts_with(char::is_whitespace)) {
            let text = self.help(rest.trim())?;
            self.print(text);
            return Ok(Outcome::Done);
        }
        let Some(cl) = self.parse(line)? else { return Ok(Outcome::NoOp) };
        let cmd = self.commands[&cl.path].clone();
        let args = Args::resolve(&cl, &cmd.params)?;
        (cmd.handler)(self, &Invocation { path: cl.path, args })
    }

    /// Runs a macro file line by line, stopping at the first error, which is
    /// reported with the file name and line number.
    pub fn execute_macro(&mut self, path: &Path) -> Result<Outcome, ShellError> {
        let r = self.run_macro(path);
        if r.is_err() && self.depth == 0 {
            self.errors += 1;
        }
        self.collect_kernel_output();
        r
    }

    fn run_macro(&mut self, path: &Path) -> Result<Outcome, ShellError> {
        if self.depth >= MAX_MACRO_DEPTH {
            return Err(ShellError::MacroDepth);
        }
        let text = std::fs::read_to_string(path)
            .map_err(|source| ShellError::MacroRead { path: path.to_path_buf(), source })?;
        self.depth += 1;
        let mut result = Ok(Outcome::Done);
        for (i, line) in text.lines().enumerate() {
            if let Err(e) = self.execute(line) {
                result = Err(ShellError::Macro { file: path.display().to_string(), line: i + 1, source: Box::new(e) });
                break;
            }
        }
        self.depth -= 1;
        result
    }

    /// Guidance and parameters of every command under `prefix` (`/` or
    /// empty for the whole tree).
    pub fn help(&self, prefix: &str) -> Result<String, ShellError> {
        let prefix = if prefix.is_empty() { "/" } else { prefix };
        if let Some(c) = self.commands.get(prefix) {
            return Ok(describe(c));
        }
        let dir = if prefix.ends_with('/') { prefix.to_string() } else { format!("{prefix}/") };
        let matching: Vec<&Command> = self.commands.values().filter(|c| c.path.starts_with(&dir)).collect();
        if matching.is_empty() {
            return Err(ShellError::UnknownCommand { path: prefix.to_string(), suggestion: self.suggest(prefix) });
        }
        let mut out = format!("Command directory {dir}\n");
        for c in matching {
            out.push_str(&describe(c));
        }
        Ok(out)
    }
}

fn describe(c: &Command) -> String {
    let mut out = format!("{}\n  {}\n", c.path, c.guidance);
    for p in &c.params {
        write!(out, "    {}: {}", p.name, p.kind).unwrap();
        match p.default {
            Some(d) => writeln!(out, " (default {})", if d.is_empty() { "\"\"" } else { d }).unwrap(),
            None => out.push_str(" (required)\n"),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::fixtures;

    fn shell() -> Shell {
        let mut vis = VisManager::new(fixtures::b1());
        vis.date_override = Some("2000-01-01".into());
        Shell::new(vis)
    }

    #[test]
    fn parse_examples() {
        let s = shell();
        let l = s.parse("/vis/viewer/set/viewpointThetaPhi 120 150").unwrap().unwrap();
        let cmd = s.command(&l.path).unwrap();
        let a = Args::resolve(&l, &cmd.params).unwrap();
        assert_eq!((a.f64("theta"), a.f64("phi")), (120.0, 150.0));
        assert!((a.unit("unit") - crate::units::DEG).abs() < 1e-15);
        assert_eq!(s.parse("# comment").unwrap(), None);
        assert_eq!(s.parse("").unwrap(), None);
        let l = s.parse("/vis/scene/add/text 0 6 -4 cm 18 4 4 Shape1").unwrap().unwrap();
        let a = Args::resolve(&l, &s.command(&l.path).unwrap().params).unwrap();
        assert_eq!(a.f64("y") * a.unit("unit"), 60.0);
        assert_eq!(a.str("text"), "Shape1");
    }

    #[test]
    fn unknown_and_directory() {
        let mut s = shell();
        let e = s.execute("/vis/viewer/set/viewpointThetaPi 1 2").unwrap_err().to_string();
        assert!(e.contains("viewpointThetaPhi"), "{e}");
        assert!(matches!(s.execute("/vis/viewer/set"), Err(ShellError::Directory(_))));
        assert_eq!(s.errors, 2);
    }

    #[test]
    fn guarded_dispatch() {
        let mut s = shell();
        let before = s.vis.state_digest();
        assert_eq!(s.execute("/vis/drawVolume").unwrap_err().to_string(), "no current viewer");
        assert_eq!(s.vis.state_digest(), before);
    }

    #[test]
    fn help_listing() {
        let s = shell();
        let h = s.help("/vis/viewer/set").unwrap();
        assert!(h.contains("/vis/viewer/set/viewpointThetaPhi\n"));
        assert!(
            h.contains("theta: double") && h.contains("phi: double") && h.contains("unit: angle unit (default deg)")
        );
        assert!(s.help("/").unwrap().contains("/run/beamOn"));
        let e = s.help("/vis/viewr").unwrap_err().to_string();
        assert!(e.contains("did you mean \"/vis/viewer/\""), "{e}");
    }

    #[test]
    fn set_commands_revert() {
        let mut s = shell();
        s.execute("/vis/set/colour red").unwrap();
        s.execute("/vis/set/lineWidth 2").unwrap();
        s.execute("/vis/set/textLayout right").unwrap();
        assert_eq!(s.vis.defaults.colour, crate::colour::Colour::RED);
        s.execute("/vis/set/colour    # Revert to default colour (white)").unwrap();
        s.execute("/vis/set/lineWidth").unwrap();
        s.execute("/vis/set/textLayout").unwrap();
        assert_eq!(s.vis.defaults, crate::kernel::VisDefaults::default());
        s.execute("/vis/set/colour 0 1 0").unwrap();
        assert_eq!(s.vis.defaults.colour, crate::colour::Colour::GREEN);
    }

    #[test]
    fn verbose_and_unsupported() {
        let mut s = shell();
        s.execute("/vis/verbose errors").unwrap();
        assert_eq!(s.vis.verbosity(), Verbosity::Errors);
        s.execute("/vis/open SVG").unwrap();
        s.execute("/vis/drawVolume").unwrap();
        assert!(matches!(s.execute("/vis/scene/add/logo").unwrap(), Outcome::Warning(_)));
        assert!(s.take_printout().iter().all(|l| !l.starts_with("WARNING")));
    }

    #[test]
    fn macros_nest_and_report_lines() {
        let dir = tempfile::tempdir().unwrap();
        let selfcall = dir.path().join("self.mac");
        std::fs::write(&selfcall, format!("/control/execute {}\n", selfcall.display())).unwrap();
        let mut s = shell();
        let e = s.execute_macro(&selfcall).unwrap_err();
        let mut depth = 0;
        let mut cur = &e;
        while let ShellError::Macro { source, .. } = cur {
            depth += 1;
            cur = source;
        }
        assert!(matches!(cur, ShellError::MacroDepth));
        assert_eq!(depth, MAX_MACRO_DEPTH);

        let bad = dir.path().join("bad.mac");
        std::fs::write(&bad, "/vis/set/lineWidth 3\n\n/vis/nonsense\n/vis/set/lineWidth 4\n").unwrap();
        let e = s.execute_macro(&bad).unwrap_err().to_string();
        assert!(e.starts_with(&format!("{}:3:", bad.display())), "{e}");
        assert_eq!(s.vis.defaults.line_width, 3.0);
    }
}
