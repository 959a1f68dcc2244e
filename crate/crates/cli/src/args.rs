use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

#[derive(Debug, Clone, Parser, Serialize)]
#[command(name = "flatdet", version, about = "Determinant experiments on flat surfaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Common {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write the table here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Run the subcommand's built-in checks instead of the experiment.
    #[arg(long, global = true)]
    pub self_test: bool,
    /// Seed for randomized point selection.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Convergence tolerance where the subcommand has one.
    #[arg(long, global = true, value_parser = positive)]
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Closed-form torus determinant against the spectral oracle.
    Genus1Det {
        #[arg(long, value_parser = complex, default_value = "0+1i")]
        sigma: Complex64,
        /// Extra random moduli with 0.2 < Im σ < 5.
        #[arg(long, default_value_t = 0)]
        count: usize,
    },
    /// Bidifferential asymptotics along a degenerating family.
    Degen {
        /// Sweep of |t|.
        #[arg(long, value_parser = sweep, default_value = "1e-3:1e-2:6")]
        eps_sweep: Sweep,
    },
    /// Structure relations of the two-series Laurent representation.
    Laurent {
        #[arg(long, value_parser = complex, default_value = "0.02+0.01i")]
        s: Complex64,
        /// Pole locations of the test differential.
        #[arg(long = "point", value_parser = complex, default_values = ["3+0.2i", "-2+1.5i"])]
        points: Vec<Complex64>,
        #[arg(long, default_value_t = 6)]
        order: usize,
    },
    /// Tau-function bookkeeping and genus-one identities.
    Tau {
        #[command(subcommand)]
        action: TauAction,
    },
    /// Dirichlet-to-Neumann operators on small circles and slit disks.
    Dtn {
        #[command(subcommand)]
        action: DtnAction,
    },
    /// Gluing experiments on a torus with a small disk removed.
    Surgery {
        #[command(subcommand)]
        action: SurgeryAction,
    },
    /// κ₀ from the four slit-disk determinants.
    Kappa0(KappaArgs),
    /// δ_g for g = 1..gmax.
    DeltaG {
        #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u32).range(1..=64))]
        gmax: u32,
        /// Use this κ₀ instead of computing it.
        #[arg(long, value_parser = positive)]
        kappa0: Option<f64>,
        #[command(flatten)]
        kappa: KappaArgs,
    },
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TauAction {
    /// Exponent totals for all genus pairs up to gmax.
    Ledger {
        #[arg(long, default_value_t = 25, value_parser = clap::value_parser!(i64).range(1..=200))]
        gmax: i64,
    },
    /// δ₁·Im σ·Area·|τ|² against the torus determinant.
    Delta1 {
        #[arg(long, value_parser = complex, default_value = "0+1i")]
        sigma: Complex64,
    },
    /// Fay identity residuals at random points.
    Fay {
        #[arg(long, value_parser = complex, default_value = "0+1i")]
        sigma: Complex64,
        #[arg(long, default_value_t = 8)]
        count: usize,
    },
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DtnAction {
    /// Trace norm of εN_ε − |ν| on the torus.
    Torus {
        #[arg(long, value_parser = complex, default_value = "0+1i")]
        sigma: Complex64,
        #[arg(long, value_parser = sweep, default_value = "1e-1:1e-3")]
        eps_sweep: Sweep,
        #[arg(long, default_value_t = 32, value_parser = truncation)]
        trunc: usize,
    },
    /// det(|ν| + N) for both slit conditions.
    Slit {
        #[arg(long, default_value_t = 0.5, value_parser = unit_open)]
        slit_ratio: f64,
        #[arg(long, default_value_t = 128, value_parser = truncation)]
        trunc: usize,
    },
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SurgeryAction {
    /// det*(N₁ + N₂)/length and its ε → 0 limit.
    Prop3(SurgeryArgs),
    /// Exterior determinant against the ε^{1/3} law.
    Corollary1(SurgeryArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SurgeryArgs {
    #[arg(long, value_parser = complex, default_value = "0+1i")]
    pub sigma: Complex64,
    #[arg(long, value_parser = sweep, default_value = "1e-1:1e-3")]
    pub eps_sweep: Sweep,
    /// Initial truncation; doubled until log det* settles.
    #[arg(long, default_value_t = 64, value_parser = truncation)]
    pub trunc: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct KappaArgs {
    #[arg(long, default_value_t = 0.5, value_parser = unit_open)]
    pub slit_ratio: f64,
    #[arg(long, default_value_t = 128, value_parser = truncation)]
    pub trunc: usize,
    /// Radial cell counts of the Laplacian grids, coarsest first.
    #[arg(long, value_delimiter = ',', default_values_t = [8usize, 16, 32])]
    pub levels: Vec<usize>,
}

/// Log-spaced sweep from `lo` to `hi` inclusive.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sweep {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl Sweep {
    pub fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.lo];
        }
        let (a, b) = (self.lo.ln(), self.hi.ln());
        (0..self.count)
            .map(|i| (a + (b - a) * i as f64 / (self.count - 1) as f64).exp())
            .collect()
    }
}

/// `lo:hi[:count]`; without a count, two points per decade.
pub fn sweep(s: &str) -> Result<Sweep, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if !(2..=3).contains(&parts.len()) {
        return Err(format!("expected lo:hi[:count], got {s:?}"));
    }
    let num = |p: &str| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}"));
    let (lo, hi) = (num(parts[0])?, num(parts[1])?);
    if !(lo > 0.0 && hi > 0.0 && lo.is_finite() && hi.is_finite()) {
        return Err(format!("sweep bounds must be positive, got {lo} and {hi}"));
    }
    let count = match parts.get(2) {
        Some(c) => c.trim().parse::<usize>().map_err(|e| format!("{c:?}: {e}"))?,
        None => (2.0 * (hi / lo).log10().abs()).round() as usize + 1,
    };
    if count == 0 || (count == 1 && lo != hi) {
        return Err(format!("sweep {s:?} needs at least two points"));
    }
    Ok(Sweep { lo, hi, count })
}

/// `a+bi`, `a-bi`, `bi` or `a`.
pub fn complex(s: &str) -> Result<Complex64, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || format!("expected a complex number like 0.1+1.2i, got {s:?}");
    let Some(body) = t.strip_suffix('i') else {
        return t.parse::<f64>().map(|re| Complex64::new(re, 0.0)).map_err(|_| bad());
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => "1",
        "-" => "-1",
        x => x,
    };
    let re = re.parse::<f64>().map_err(|_| bad())?;
    let im = im.parse::<f64>().map_err(|_| bad())?;
    if !(re.is_finite() && im.is_finite()) {
        return Err(bad());
    }
    Ok(Complex64::new(re, im))
}

fn positive(s: &str) -> Result<f64, String> {
    let v = s.parse::<f64>().map_err(|e| e.to_string())?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("{v} must be positive"))
    }
}

fn unit_open(s: &str) -> Result<f64, String> {
    let v = s.parse::<f64>().map_err(|e| e.to_string())?;
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(format!("{v} must lie in (0, 1)"))
    }
}

fn truncation(s: &str) -> Result<usize, String> {
    let v = s.parse::<usize>().map_err(|e| e.to_string())?;
    if (4..=4096).contains(&v) {
        Ok(v)
    } else {
        Err(format!("truncation {v} must lie in 4..=4096"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_forms() {
        assert_eq!(complex("0+1i").unwrap(), Complex64::new(0.0, 1.0));
        assert_eq!(complex("0.5-1.25i").unwrap(), Complex64::new(0.5, -1.25));
        assert_eq!(complex("-2i").unwrap(), Complex64::new(0.0, -2.0));
        assert_eq!(complex("i").unwrap(), Complex64::new(0.0, 1.0));
        assert_eq!(complex("3").unwrap(), Complex64::new(3.0, 0.0));
        assert_eq!(complex("1e-1+2e-1i").unwrap(), Complex64::new(0.1, 0.2));
        assert_eq!(complex("-1e-2-3E+1i").unwrap(), Complex64::new(-0.01, -30.0));
        assert!(complex("1+").is_err());
        assert!(complex("abc").is_err());
    }

    #[test]
    fn sweep_forms() {
        let s = sweep("1e-1:1e-3").unwrap();
        assert_eq!(s.count, 5);
        let p = s.points();
        assert!((p[0] - 0.1).abs() < 1e-15 && (p[4] - 1e-3).abs() < 1e-17);
        assert!((p[2] - 1e-2).abs() < 1e-16);
        assert_eq!(sweep("1:2:3").unwrap().count, 3);
        assert!(sweep("0:1").is_err());
        assert!(sweep("1").is_err());
        assert!(sweep("1:2:1").is_err());
    }
}
