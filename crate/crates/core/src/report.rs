//! Verification records and their CSV serialization.
//!
//! Every inequality check produces one row: left side, right side, the
//! constant in play, the discretization slack, and a pass flag. The CSV
//! schema is shared by all suites; Gaussian checks append their extra
//! columns, others leave them empty. Rows are value objects; formatting uses
//! the shortest round-trip float representation so a rerun with the same
//! seed is byte-identical.

use crate::scalar::Scalar;

/// Schema version line written at the top of every report CSV.
pub const CSV_HEADER_COMMENT: &str = "# quantiso report csv v1";
pub const CSV_COLUMNS: &str =
    "check,d,h,lhs,rhs,constant,slack,pass,witness,s_e,lambda,r_lambda,nu";

/// Record of one inequality check.
#[derive(Clone, Debug)]
pub struct VerificationReport<T: Scalar = f64> {
    pub check: String,
    pub dim: usize,
    pub h: T,
    pub lhs: T,
    pub rhs: T,
    pub constant: Option<T>,
    pub slack: T,
    pub pass: bool,
    pub witness: Option<String>,
    /// Gaussian-only columns.
    pub s_e: Option<T>,
    pub lambda: Option<T>,
    pub r_lambda: Option<T>,
    pub nu: Option<String>,
}

impl<T: Scalar> VerificationReport<T> {
    pub fn new(check: impl Into<String>, dim: usize, h: T) -> Self {
        Self {
            check: check.into(),
            dim,
            h,
            lhs: T::zero(),
            rhs: T::zero(),
            constant: None,
            slack: T::zero(),
            pass: false,
            witness: None,
            s_e: None,
            lambda: None,
            r_lambda: None,
            nu: None,
        }
    }

    /// One-sided check `lhs <= rhs + slack`, recording everything.
    pub fn check_leq(mut self, lhs: T, rhs: T, slack: T) -> Self {
        self.lhs = lhs;
        self.rhs = rhs;
        self.slack = slack;
        self.pass = lhs <= rhs + slack;
        self
    }

    pub fn with_constant(mut self, c: T) -> Self {
        self.constant = Some(c);
        self
    }

    pub fn with_witness(mut self, w: impl Into<String>) -> Self {
        self.witness = Some(w.into());
        self
    }

    pub fn csv_row(&self) -> String {
        fn opt<T: std::fmt::Display>(v: &Option<T>) -> String {
            v.as_ref().map(|x| x.to_string()).unwrap_or_default()
        }
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.check,
            self.dim,
            self.h,
            self.lhs,
            self.rhs,
            opt(&self.constant),
            self.slack,
            self.pass,
            self.witness.clone().unwrap_or_default(),
            opt(&self.s_e),
            opt(&self.lambda),
            opt(&self.r_lambda),
            self.nu.clone().unwrap_or_default(),
        )
    }
}

/// Render a full report CSV with the version comment, header and rows
/// ordered deterministically by check name (stable for equal names).
pub fn render_csv<T: Scalar>(reports: &[VerificationReport<T>]) -> String {
    let mut rows: Vec<&VerificationReport<T>> = reports.iter().collect();
    rows.sort_by(|a, b| a.check.cmp(&b.check));
    let mut out = String::new();
    out.push_str(CSV_HEADER_COMMENT);
    out.push('\n');
    out.push_str(CSV_COLUMNS);
    out.push('\n');
    for r in rows {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn row_formatting_and_ordering() {
        let a = VerificationReport::<f64>::new("b_check", 2, 0.25).check_leq(1.0, 2.0, 0.1);
        let b = VerificationReport::<f64>::new("a_check", 1, 0.5)
            .check_leq(3.0, 1.0, 0.0)
            .with_constant(7.25);
        assert!(a.pass);
        assert!(!b.pass);
        let csv = render_csv(&[a, b]);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], CSV_HEADER_COMMENT);
        assert!(lines[2].starts_with("a_check,1,0.5,3,1,7.25,0,false"));
        assert!(lines[3].starts_with("b_check,2,0.25,1,2,,0.1,true"));
    }
}
