//! Verification report: one check per line, `name | value | tol | pass | identity`.

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// pass iff value ≤ tol
    AtMost,
    /// pass iff value > tol
    Above,
}

#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tol: f64,
    pub direction: Direction,
    /// The algebraic identity or bound the check certifies.
    pub identity: String,
}

impl Check {
    pub fn at_most(name: &str, value: f64, tol: f64, identity: &str) -> Self {
        Check {
            name: name.to_string(),
            value,
            tol,
            direction: Direction::AtMost,
            identity: identity.to_string(),
        }
    }

    pub fn above(name: &str, value: f64, tol: f64, identity: &str) -> Self {
        Check {
            name: name.to_string(),
            value,
            tol,
            direction: Direction::Above,
            identity: identity.to_string(),
        }
    }

    pub fn pass(&self) -> bool {
        match self.direction {
            Direction::AtMost => self.value <= self.tol,
            Direction::Above => self.value > self.tol,
        }
    }
}

#[derive(Debug, Default)]
pub struct VerificationReport {
    pub seed: u64,
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn new(seed: u64) -> Self {
        VerificationReport { seed, checks: Vec::new() }
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(Check::pass)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# seed = {:#x}\n", self.seed));
        for c in &self.checks {
            out.push_str(&format!(
                "{} | {} | {} | {} | {}\n",
                c.name,
                fmt_g17(c.value),
                fmt_g17(c.tol),
                if c.pass() { "pass" } else { "FAIL" },
                c.identity
            ));
        }
        out.push_str(&format!(
            "overall: {}\n",
            if self.all_pass() { "pass" } else { "FAIL" }
        ));
        out
    }
}

/// 17 significant digits, enough for a lossless f64 round-trip.
pub fn fmt_g17(x: f64) -> String {
    format!("{:.16e}", x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn render_and_overall() {
        let mut r = VerificationReport::new(0x5EED);
        r.push(Check::at_most("sum", 1e-4, 5e-3, "C+ + C- = 1"));
        r.push(Check::above("sectorial", 0.01, 0.0, "Herm(W K0) > 0"));
        assert!(r.all_pass());
        let text = r.render();
        assert!(text.contains("sum | 1."));
        assert!(text.contains("| pass | C+ + C- = 1"));
        assert!(text.ends_with("overall: pass\n"));
        r.push(Check::at_most("bad", 1.0, 0.5, "x"));
        assert!(!r.all_pass());
    }

    #[test]
    fn g17_round_trips() {
        for &x in &[0.1, 1.0 / 3.0, 2.5e-13, -7.125e8, f64::MIN_POSITIVE] {
            let s = fmt_g17(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back, x, "{s}");
        }
    }
}
