//! Line-oriented check reports: `CHECK <name> PASS|FAIL [witness]` and
//! `RESULT <name> <value>` records, in insertion order.

use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Line {
    Check { name: String, pass: bool, instances: usize, witness: Option<String> },
    Result { name: String, value: String },
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Report {
    lines: Vec<Line>,
}

impl Report {
    pub fn new() -> Report {
        Report::default()
    }

    /// Records one instance of check `name`. Repeated names are merged into
    /// a single line that keeps the first failure witness.
    pub fn record(&mut self, name: &str, outcome: Result<(), String>) {
        let existing = self.lines.iter_mut().find_map(|l| match l {
            Line::Check { name: n, pass, instances, witness } if n == name => {
                Some((pass, instances, witness))
            }
            _ => None,
        });
        match existing {
            Some((pass, instances, witness)) => {
                *instances += 1;
                if let Err(w) = outcome {
                    if *pass {
                        *pass = false;
                        *witness = Some(w);
                    }
                }
            }
            None => {
                let (pass, witness) = match outcome {
                    Ok(()) => (true, None),
                    Err(w) => (false, Some(w)),
                };
                self.lines.push(Line::Check { name: name.to_string(), pass, instances: 1, witness });
            }
        }
    }

    pub fn check(&mut self, name: &str, pass: bool, witness: impl FnOnce() -> String) {
        self.record(name, if pass { Ok(()) } else { Err(witness()) });
    }

    /// A check whose premises are empty; recorded as a pass with a note.
    pub fn vacuous(&mut self, name: &str, why: &str) {
        self.lines.push(Line::Check {
            name: name.to_string(),
            pass: true,
            instances: 0,
            witness: Some(format!("vacuous: {why}")),
        });
    }

    pub fn result(&mut self, name: &str, value: impl fmt::Display) {
        self.lines.push(Line::Result { name: name.to_string(), value: value.to_string() });
    }

    pub fn skip(&mut self, name: &str, why: impl fmt::Display) {
        self.result(name, format_args!("skipped: {why}"));
    }

    /// Appends `other`, merging check lines that share a name.
    pub fn merge(&mut self, other: Report) {
        for line in other.lines {
            match line {
                Line::Check { name, pass, instances, witness } => {
                    let existing = self.lines.iter_mut().find_map(|l| match l {
                        Line::Check { name: n, pass, instances, witness } if *n == name => {
                            Some((pass, instances, witness))
                        }
                        _ => None,
                    });
                    match existing {
                        Some((p, i, w)) => {
                            *i += instances;
                            if *p && !pass {
                                *p = false;
                                *w = witness;
                            }
                        }
                        None => self.lines.push(Line::Check { name, pass, instances, witness }),
                    }
                }
                other => self.lines.push(other),
            }
        }
    }

    /// Appends `other` verbatim, without merging.
    pub fn append(&mut self, other: Report) {
        self.lines.extend(other.lines);
    }

    pub fn lines(&self) -> &[Line] {
        &self.lines
    }

    pub fn all_pass(&self) -> bool {
        self.lines.iter().all(|l| !matches!(l, Line::Check { pass: false, .. }))
    }

    pub fn failures(&self) -> Vec<&Line> {
        self.lines.iter().filter(|l| matches!(l, Line::Check { pass: false, .. })).collect()
    }

    pub fn check_passed(&self, name: &str) -> Option<bool> {
        self.lines.iter().find_map(|l| match l {
            Line::Check { name: n, pass, .. } if n == name => Some(*pass),
            _ => None,
        })
    }

    pub fn result_value(&self, name: &str) -> Option<&str> {
        self.lines.iter().find_map(|l| match l {
            Line::Result { name: n, value } if n == name => Some(value.as_str()),
            _ => None,
        })
    }
}

impl fmt::Display for Line {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Line::Check { name, pass, instances, witness } => {
                write!(f, "CHECK {name} {}", if *pass { "PASS" } else { "FAIL" })?;
                match witness {
                    Some(w) => write!(f, " {w}"),
                    None if *instances > 1 => write!(f, " instances={instances}"),
                    None => Ok(()),
                }
            }
            Line::Result { name, value } => write!(f, "RESULT {name} {value}"),
        }
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for line in &self.lines {
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn records_merge_by_name() {
        let mut r = Report::new();
        r.record("a", Ok(()));
        r.record("a", Ok(()));
        r.record("b", Err("x=1".into()));
        r.record("b", Err("x=2".into()));
        r.result("count", 3);
        assert_eq!(r.to_string(), "CHECK a PASS instances=2\nCHECK b FAIL x=1\nRESULT count 3\n");
        assert!(!r.all_pass());
        assert_eq!(r.failures().len(), 1);
    }

    #[test]
    fn vacuous_and_skip_lines() {
        let mut r = Report::new();
        r.vacuous("c", "z = 0");
        r.skip("d", "premise fails");
        assert!(r.all_pass());
        assert_eq!(r.to_string(), "CHECK c PASS vacuous: z = 0\nRESULT d skipped: premise fails\n");
    }

    #[test]
    fn merge_keeps_first_failure() {
        let mut a = Report::new();
        a.record("k", Ok(()));
        let mut b = Report::new();
        b.record("k", Err("w".into()));
        a.merge(b);
        assert_eq!(a.check_passed("k"), Some(false));
        assert_eq!(a.to_string(), "CHECK k FAIL w\n");
    }
}
