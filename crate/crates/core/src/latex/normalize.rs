use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::lexer::{tokenize_latex, LatexToken, LatexTokenKind};
use super::policy::NormPolicy;
use crate::diagnostic::{codes, Diagnostic};

const MAX_ROUNDS: usize = 8;
const SIZED_PREFIXES: [&str; 4] = ["\\Bigg", "\\bigg", "\\Big", "\\big"];
const OPENERS: [&str; 8] = ["(", "[", "\\{", "\\langle", "\\lfloor", "\\lceil", "\\lvert", "\\lVert"];
const CLOSERS: [&str; 8] = [")", "]", "\\}", "\\rangle", "\\rfloor", "\\rceil", "\\rvert", "\\rVert"];

#[derive(Debug, Clone, PartialEq, Eq)]
enum Node {
    Cmd(String),
    Sym(char),
    Space,
    Group(Vec<Node>),
}

impl Node {
    fn is_cmd(&self, name: &str) -> bool {
        matches!(self, Node::Cmd(c) if c == name)
    }
}

pub fn normalize(src: &str, policy: &NormPolicy) -> String {
    normalize_with_diagnostics(src, policy).0
}

/// Normalizes `src` and reports unbalanced braces, unpaired delimiters and
/// missing delimiters found on the way.
pub fn normalize_with_diagnostics(src: &str, policy: &NormPolicy) -> (String, Vec<Diagnostic>) {
    let mut diagnostics = Vec::new();
    let mut current = round(src, policy, &mut diagnostics);
    for _ in 1..MAX_ROUNDS {
        let next = round(&current, policy, &mut Vec::new());
        if next == current {
            break;
        }
        current = next;
    }
    (current, diagnostics)
}

fn round(src: &str, policy: &NormPolicy, diagnostics: &mut Vec<Diagnostic>) -> String {
    let (tokens, lex_diagnostics) = tokenize_latex(src);
    diagnostics.extend(lex_diagnostics);
    let tree = infix(build(&tokens), policy);
    let mut pass = Pass { policy, diagnostics };
    let nodes = pass.level(tree);
    let mut out = String::with_capacity(src.len());
    print(&nodes, &mut out);
    out
}

fn build(tokens: &[LatexToken]) -> Vec<Node> {
    let mut out = Vec::new();
    for (i, token) in tokens.iter().enumerate() {
        match token.kind {
            LatexTokenKind::Command => out.push(Node::Cmd(token.lexeme.clone())),
            LatexTokenKind::Symbol => {
                let ch = token.lexeme.chars().next().unwrap_or(' ');
                // a lone trailing backslash has no meaning
                if ch != '\\' {
                    out.push(Node::Sym(ch));
                }
            }
            LatexTokenKind::Whitespace => out.push(Node::Space),
            LatexTokenKind::BracedGroup => out.push(Node::Group(build(&token.children))),
            LatexTokenKind::BraceOpen => {
                out.push(Node::Group(build(&tokens[i + 1..])));
                break;
            }
            LatexTokenKind::BraceClose => {}
        }
    }
    out
}

fn is_letter_command(name: &str) -> bool {
    name.len() > 1 && name.as_bytes()[1].is_ascii_alphabetic()
}

fn print(nodes: &[Node], out: &mut String) {
    for (i, node) in nodes.iter().enumerate() {
        match node {
            Node::Cmd(name) => {
                out.push_str(name);
                if is_letter_command(name) {
                    if let Some(Node::Sym(c)) = nodes.get(i + 1) {
                        if c.is_ascii_alphabetic() {
                            out.push(' ');
                        }
                    }
                }
            }
            Node::Sym(c) => out.push(*c),
            Node::Space => out.push(' '),
            Node::Group(inner) => {
                out.push('{');
                print(inner, out);
                out.push('}');
            }
        }
    }
}

fn trim(mut nodes: Vec<Node>) -> Vec<Node> {
    while nodes.last() == Some(&Node::Space) {
        nodes.pop();
    }
    let lead = nodes.iter().take_while(|n| **n == Node::Space).count();
    nodes.drain(..lead);
    nodes
}

/// Rewrites `a \over b` as `\frac{a}{b}` at every level.
fn infix(nodes: Vec<Node>, policy: &NormPolicy) -> Vec<Node> {
    let nodes: Vec<Node> = nodes
        .into_iter()
        .map(|n| match n {
            Node::Group(inner) => Node::Group(infix(inner, policy)),
            other => other,
        })
        .collect();
    let split = nodes.iter().enumerate().find_map(|(i, n)| match n {
        Node::Cmd(name) => policy.infix.get(name).map(|target| (i, target.clone())),
        _ => None,
    });
    match split {
        None => nodes,
        Some((i, target)) => {
            let mut nodes = nodes;
            let right = nodes.split_off(i + 1);
            nodes.pop();
            vec![
                Node::Cmd(target),
                Node::Group(trim(nodes)),
                Node::Group(trim(infix(right, policy))),
            ]
        }
    }
}

fn next_solid(nodes: &[Node], from: usize) -> Option<usize> {
    (from..nodes.len()).find(|&j| nodes[j] != Node::Space)
}

fn delimiter_key(node: &Node) -> Option<String> {
    match node {
        Node::Sym(c) => Some(String::from(*c)),
        Node::Cmd(name) => Some(name.clone()),
        _ => None,
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Sized {
    Left,
    Right,
    Middle,
    Plain,
}

fn sized(name: &str) -> Option<Sized> {
    let rest = SIZED_PREFIXES.iter().find_map(|p| name.strip_prefix(p))?;
    match rest {
        "" => Some(Sized::Plain),
        "l" => Some(Sized::Left),
        "r" => Some(Sized::Right),
        "m" => Some(Sized::Middle),
        _ => None,
    }
}

struct Pass<'a> {
    policy: &'a NormPolicy,
    diagnostics: &'a mut Vec<Diagnostic>,
}

impl Pass<'_> {
    fn level(&mut self, nodes: Vec<Node>) -> Vec<Node> {
        let nodes = self.filter(nodes);
        let nodes: Vec<Node> = nodes
            .into_iter()
            .map(|n| match n {
                Node::Group(inner) => Node::Group(self.level(inner)),
                other => other,
            })
            .collect();
        let rules = self.policy.collapse;
        let nodes = if rules.sized_delimiters {
            self.sized_delimiters(nodes)
        } else {
            nodes
        };
        let nodes = self.balance(nodes);
        let nodes = if rules.brace_arguments {
            self.brace_arguments(nodes)
        } else {
            nodes
        };
        let nodes = self.scripts(nodes);
        let nodes = if rules.dots { self.dots(nodes) } else { nodes };
        let nodes = if rules.spacing {
            self.collapse_runs(nodes, |p, name| p.spacing_commands.contains(name), false)
        } else {
            nodes
        };
        squeeze(nodes)
    }

    fn filter(&mut self, nodes: Vec<Node>) -> Vec<Node> {
        let mut out = Vec::with_capacity(nodes.len());
        let mut iter = nodes.into_iter().peekable();
        while let Some(node) = iter.next() {
            match node {
                Node::Cmd(name) if self.policy.remove.contains(&name) => {}
                Node::Cmd(name) if self.policy.remove_with_argument.contains(&name) => {
                    while iter.peek() == Some(&Node::Space) {
                        iter.next();
                    }
                    iter.next();
                }
                Node::Cmd(name) => out.push(Node::Cmd(self.policy.resolve(&name).into())),
                other => out.push(other),
            }
        }
        out
    }

    /// Pairs `\big(` ... `\big)` style delimiters into `\left` / `\right`
    /// and drops the sizing of anything left unpaired.
    fn sized_delimiters(&mut self, nodes: Vec<Node>) -> Vec<Node> {
        enum Fate {
            Left,
            Right,
            Drop,
        }
        let mut fate: Vec<Option<Fate>> = nodes.iter().map(|_| None).collect();
        let mut stack: Vec<(usize, String)> = Vec::new();
        for (i, node) in nodes.iter().enumerate() {
            let Node::Cmd(name) = node else { continue };
            let Some(kind) = sized(name) else { continue };
            let delimiter = next_solid(&nodes, i + 1).and_then(|j| delimiter_key(&nodes[j]));
            let Some(key) = delimiter else {
                self.unpaired(name);
                fate[i] = Some(Fate::Drop);
                continue;
            };
            let opens = match kind {
                Sized::Left => true,
                Sized::Right => false,
                Sized::Middle => {
                    fate[i] = Some(Fate::Drop);
                    continue;
                }
                Sized::Plain => {
                    if OPENERS.contains(&key.as_str()) {
                        true
                    } else if CLOSERS.contains(&key.as_str()) {
                        false
                    } else {
                        stack.last().is_none_or(|(_, top)| *top != key)
                    }
                }
            };
            if opens {
                stack.push((i, key));
            } else if let Some((open, _)) = stack.pop() {
                fate[open] = Some(Fate::Left);
                fate[i] = Some(Fate::Right);
            } else {
                self.unpaired(name);
                fate[i] = Some(Fate::Drop);
            }
        }
        for (open, _) in stack {
            if let Node::Cmd(name) = &nodes[open] {
                self.unpaired(name);
            }
            fate[open] = Some(Fate::Drop);
        }

        let mut out = Vec::with_capacity(nodes.len());
        let mut skip_space = false;
        for (node, fate) in nodes.into_iter().zip(fate) {
            if skip_space && node == Node::Space {
                continue;
            }
            skip_space = false;
            match fate {
                Some(Fate::Left) => {
                    out.push(Node::Cmd("\\left".into()));
                    skip_space = true;
                }
                Some(Fate::Right) => {
                    out.push(Node::Cmd("\\right".into()));
                    skip_space = true;
                }
                Some(Fate::Drop) => {}
                None => out.push(node),
            }
        }
        out
    }

    fn unpaired(&mut self, name: &str) {
        self.diagnostics.push(Diagnostic::warning(
            codes::UNPAIRED_DELIMITER,
            format!("`{name}` has no partner and loses its sizing"),
        ));
    }

    /// Gives every `\left` and `\right` a delimiter and a partner.
    fn balance(&mut self, nodes: Vec<Node>) -> Vec<Node> {
        let mut out = Vec::with_capacity(nodes.len());
        let mut depth = 0usize;
        let mut orphans = 0usize;
        let mut iter = nodes.into_iter().peekable();
        while let Some(node) = iter.next() {
            let is_left = node.is_cmd("\\left");
            let is_right = node.is_cmd("\\right");
            if !(is_left || is_right) {
                out.push(node);
                continue;
            }
            while iter.peek() == Some(&Node::Space) {
                iter.next();
            }
            out.push(node);
            match iter.peek() {
                Some(Node::Sym(_) | Node::Cmd(_)) => out.push(iter.next().expect("peeked")),
                _ => {
                    self.diagnostics.push(Diagnostic::warning(
                        codes::MISSING_DELIMITER,
                        if is_left { "`\\left` without a delimiter" } else { "`\\right` without a delimiter" },
                    ));
                    out.push(Node::Sym('.'));
                }
            }
            if is_left {
                depth += 1;
            } else if depth > 0 {
                depth -= 1;
            } else {
                orphans += 1;
            }
        }
        if orphans > 0 || depth > 0 {
            self.diagnostics.push(Diagnostic::warning(
                codes::UNPAIRED_DELIMITER,
                format!("{orphans} unmatched `\\right` and {depth} unmatched `\\left` balanced with `.`"),
            ));
        }
        let mut balanced = Vec::with_capacity(out.len() + 2 * (orphans + depth));
        for _ in 0..orphans {
            balanced.push(Node::Cmd("\\left".into()));
            balanced.push(Node::Sym('.'));
        }
        balanced.extend(out);
        for _ in 0..depth {
            balanced.push(Node::Cmd("\\right".into()));
            balanced.push(Node::Sym('.'));
        }
        balanced
    }

    /// Collects the optional `[...]` argument and braces `count` mandatory
    /// arguments starting at `j`. Returns the nodes and the next index.
    fn arguments(&self, name: &str, nodes: &[Node], mut j: usize, count: usize, out: &mut Vec<Node>) -> usize {
        if self.policy.optional_argument.contains(name) {
            if let Some(k) = next_solid(nodes, j) {
                if nodes[k] == Node::Sym('[') {
                    let mut depth = 0usize;
                    let close = (k..nodes.len()).find(|&m| {
                        match nodes[m] {
                            Node::Sym('[') => depth += 1,
                            Node::Sym(']') => depth -= 1,
                            _ => {}
                        }
                        depth == 0
                    });
                    if let Some(close) = close {
                        out.extend(nodes[k..=close].iter().cloned());
                        j = close + 1;
                    }
                }
            }
        }
        for _ in 0..count {
            match next_solid(nodes, j) {
                Some(k) => {
                    out.push(match &nodes[k] {
                        Node::Group(_) => nodes[k].clone(),
                        other => Node::Group(vec![other.clone()]),
                    });
                    j = k + 1;
                }
                None => {
                    out.push(Node::Group(Vec::new()));
                    j = nodes.len();
                }
            }
        }
        j
    }

    fn brace_arguments(&mut self, nodes: Vec<Node>) -> Vec<Node> {
        let mut out = Vec::with_capacity(nodes.len());
        let mut i = 0;
        while i < nodes.len() {
            if let Node::Cmd(name) = &nodes[i] {
                if let Some(&count) = self.policy.arity.get(name) {
                    out.push(nodes[i].clone());
                    i = self.arguments(name, &nodes, i + 1, count, &mut out);
                    continue;
                }
            }
            out.push(nodes[i].clone());
            i += 1;
        }
        out
    }

    /// Removes whitespace around `^` and `_`, braces their operand and
    /// turns `^{\prime...}` into primes.
    fn scripts(&mut self, nodes: Vec<Node>) -> Vec<Node> {
        let brace = self.policy.collapse.brace_arguments;
        let primes = self.policy.collapse.primes;
        let mut out: Vec<Node> = Vec::with_capacity(nodes.len());
        let mut i = 0;
        while i < nodes.len() {
            let Node::Sym(op @ ('^' | '_')) = nodes[i] else {
                out.push(nodes[i].clone());
                i += 1;
                continue;
            };
            while out.last() == Some(&Node::Space) {
                out.pop();
            }
            let Some(k) = next_solid(&nodes, i + 1) else {
                out.push(Node::Sym(op));
                if brace {
                    out.push(Node::Group(Vec::new()));
                }
                break;
            };
            let (operand, next) = match &nodes[k] {
                Node::Group(inner) => (Some(inner.clone()), k + 1),
                Node::Cmd(name) if brace && self.policy.arity.contains_key(name) => {
                    let mut group = vec![nodes[k].clone()];
                    let count = self.policy.arity[name];
                    let next = self.arguments(name, &nodes, k + 1, count, &mut group);
                    (Some(group), next)
                }
                other if brace || other.is_cmd("\\prime") => (Some(vec![other.clone()]), k + 1),
                _ => (None, k),
            };
            match operand {
                Some(inner)
                    if primes
                        && op == '^'
                        && inner.iter().any(|n| n.is_cmd("\\prime"))
                        && inner.iter().all(|n| n.is_cmd("\\prime") || *n == Node::Space) =>
                {
                    let count = inner.iter().filter(|n| n.is_cmd("\\prime")).count();
                    out.extend(core::iter::repeat_n(Node::Sym('\''), count));
                }
                Some(inner) => {
                    out.push(Node::Sym(op));
                    out.push(Node::Group(inner));
                }
                None => out.push(Node::Sym(op)),
            }
            i = next;
        }
        out
    }

    fn dots(&mut self, nodes: Vec<Node>) -> Vec<Node> {
        let mut out: Vec<Node> = Vec::with_capacity(nodes.len());
        let mut i = 0;
        while i < nodes.len() {
            let after_delimiter_command = matches!(
                out.last(),
                Some(Node::Cmd(name)) if name == "\\left" || name == "\\right" || name == "\\middle"
            );
            if nodes[i] == Node::Sym('.') && !after_delimiter_command {
                let run = nodes[i..].iter().take_while(|n| **n == Node::Sym('.')).count();
                if run >= 3 {
                    out.push(Node::Cmd("\\ldots".into()));
                    i += run;
                    continue;
                }
            }
            out.push(nodes[i].clone());
            i += 1;
        }
        self.collapse_runs(out, |p, name| p.dot_commands.contains(name), true)
    }

    /// Keeps only the first command of each run of commands selected by
    /// `member`, whitespace between them included. With `same` the run
    /// must repeat one command.
    fn collapse_runs(&mut self, nodes: Vec<Node>, member: fn(&NormPolicy, &str) -> bool, same: bool) -> Vec<Node> {
        let mut out: Vec<Node> = Vec::with_capacity(nodes.len());
        let mut i = 0;
        while i < nodes.len() {
            out.push(nodes[i].clone());
            let Node::Cmd(first) = &nodes[i] else {
                i += 1;
                continue;
            };
            i += 1;
            if !member(self.policy, first) {
                continue;
            }
            while let Some(k) = next_solid(&nodes, i) {
                match &nodes[k] {
                    Node::Cmd(name) if member(self.policy, name) && (!same || name == first) => i = k + 1,
                    _ => break,
                }
            }
        }
        out
    }
}

/// Collapses whitespace runs and trims both ends.
fn squeeze(nodes: Vec<Node>) -> Vec<Node> {
    let mut out: Vec<Node> = Vec::with_capacity(nodes.len());
    for node in nodes {
        if node == Node::Space && out.last().is_none_or(|n| *n == Node::Space) {
            continue;
        }
        out.push(node);
    }
    trim(out)
}
