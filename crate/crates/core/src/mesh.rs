//! Meshes of the unit interval.
//!
//! A [`Mesh1D`] stores its nodes explicitly, so meshes read from a file and
//! generated meshes behave identically. The end nodes are always the exact
//! constants `0.0` and `1.0`.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Ordered nodes `0 = x_0 < x_1 < ... < x_n = 1` with cached widths
/// `h_j = x_j - x_{j-1}` (stored 0-based: `widths()[j - 1] == h_j`).
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh1D {
    nodes: Vec<f64>,
    widths: Vec<f64>,
}

impl Mesh1D {
    /// Validates and wraps an explicit node list.
    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 3 {
            return Err(Error::InvalidMesh(format!(
                "need at least 3 nodes (one interior), got {}",
                nodes.len()
            )));
        }
        if let Some(x) = nodes.iter().find(|x| !x.is_finite()) {
            return Err(Error::InvalidMesh(format!("non-finite node {x}")));
        }
        if nodes[0] != 0.0 {
            return Err(Error::InvalidMesh(format!("first node must be 0, got {}", nodes[0])));
        }
        let last = nodes[nodes.len() - 1];
        if last != 1.0 {
            return Err(Error::InvalidMesh(format!("last node must be 1, got {last}")));
        }
        let widths: Vec<f64> = nodes.windows(2).map(|w| w[1] - w[0]).collect();
        if let Some(j) = widths.iter().position(|&h| h <= 0.0) {
            return Err(Error::InvalidMesh(format!(
                "nodes not strictly increasing at x_{} = {} -> x_{} = {}",
                j,
                nodes[j],
                j + 1,
                nodes[j + 1]
            )));
        }
        let n = widths.len();
        let total: f64 = widths.iter().sum();
        if (total - 1.0).abs() > 4.0 * n as f64 * f64::EPSILON {
            return Err(Error::InvalidMesh(format!("widths sum to {total}, not 1")));
        }
        Ok(Mesh1D { nodes, widths })
    }

    /// `x_j = j/n`.
    pub fn uniform(n: usize) -> Result<Self> {
        check_element_count(n)?;
        let nodes = (0..=n).map(|j| j as f64 / n as f64).collect();
        Self::from_nodes(nodes)
    }

    /// `x_j = (j/n)^beta`, clustering nodes toward `x = 0` for `beta > 1`.
    pub fn graded(n: usize, beta: f64) -> Result<Self> {
        check_element_count(n)?;
        if !(beta >= 1.0) || !beta.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "grading exponent must be finite and >= 1, got {beta}"
            )));
        }
        let mut nodes: Vec<f64> = (0..=n)
            .map(|j| {
                let t = j as f64 / n as f64;
                if beta == 1.0 {
                    t
                } else {
                    t.powf(beta)
                }
            })
            .collect();
        nodes[0] = 0.0;
        nodes[n] = 1.0;
        Self::from_nodes(nodes)
    }

    /// Uniform nodes shifted by `rho / n * xi_j` with `xi_j` in `(-1/2, 1/2)`
    /// drawn from a ChaCha8 stream seeded with `seed`. Every width lies in
    /// `((1 - rho)/n, (1 + rho)/n)`.
    pub fn perturbed(n: usize, rho: f64, seed: u64) -> Result<Self> {
        check_element_count(n)?;
        if !(0.0..1.0).contains(&rho) {
            return Err(Error::InvalidArgument(format!(
                "perturbation amplitude must lie in [0, 1), got {rho}"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = 1.0 / n as f64;
        let mut nodes = Vec::with_capacity(n + 1);
        nodes.push(0.0);
        for j in 1..n {
            let xi = loop {
                let v: f64 = rng.random::<f64>() - 0.5;
                if v > -0.5 {
                    break v;
                }
            };
            let base = j as f64 / n as f64;
            nodes.push(if rho == 0.0 { base } else { base + rho * h * xi });
        }
        nodes.push(1.0);
        Self::from_nodes(nodes)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Interior nodes `x_1 .. x_{n-1}`.
    pub fn interior(&self) -> &[f64] {
        &self.nodes[1..self.nodes.len() - 1]
    }

    pub fn widths(&self) -> &[f64] {
        &self.widths
    }

    /// Number of elements `n`.
    pub fn n(&self) -> usize {
        self.widths.len()
    }

    /// Number of interior nodes, `n - 1`.
    pub fn interior_len(&self) -> usize {
        self.widths.len() - 1
    }

    pub fn max_h(&self) -> f64 {
        self.widths.iter().copied().fold(0.0, f64::max)
    }

    /// Mirror image `x_j -> 1 - x_{n-j}`.
    pub fn mirrored(&self) -> Self {
        let n = self.n();
        let mut nodes: Vec<f64> = (0..=n).map(|j| 1.0 - self.nodes[n - j]).collect();
        nodes[0] = 0.0;
        nodes[n] = 1.0;
        Self::from_nodes(nodes).expect("mirror of a valid mesh is valid")
    }

    /// Reads the one-node-per-line text format. Blank lines and lines
    /// starting with `#` are skipped.
    pub fn read_from(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse_nodes(&text)
    }

    pub fn parse_nodes(text: &str) -> Result<Self> {
        let mut nodes = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let x: f64 = line
                .parse()
                .map_err(|_| Error::Parse(format!("line {}: not a number: '{line}'", lineno + 1)))?;
            nodes.push(x);
        }
        Self::from_nodes(nodes)
    }

    /// Writes the node file format (LF line endings, shortest round-trip
    /// decimal representation).
    pub fn to_node_text(&self) -> String {
        let mut out = String::with_capacity(self.nodes.len() * 20);
        for x in &self.nodes {
            out.push_str(&format!("{x}\n"));
        }
        out
    }
}

fn check_element_count(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "need n >= 2 elements (at least one interior node), got {n}"
        )));
    }
    Ok(())
}

/// Textual mesh descriptor:
/// `uniform:<n>`, `graded:<beta>:<n>`, `perturbed:<rho>:<n>:<seed>`, `file:<path>`.
#[derive(Debug, Clone, PartialEq)]
pub enum MeshDescriptor {
    Uniform { n: usize },
    Graded { beta: f64, n: usize },
    Perturbed { rho: f64, n: usize, seed: u64 },
    File(PathBuf),
}

impl MeshDescriptor {
    pub fn build(&self) -> Result<Mesh1D> {
        match self {
            MeshDescriptor::Uniform { n } => Mesh1D::uniform(*n),
            MeshDescriptor::Graded { beta, n } => Mesh1D::graded(*n, *beta),
            MeshDescriptor::Perturbed { rho, n, seed } => Mesh1D::perturbed(*n, *rho, *seed),
            MeshDescriptor::File(path) => Mesh1D::read_from(path),
        }
    }
}

fn parse_field<T: FromStr>(field: &str, what: &str, desc: &str) -> Result<T> {
    field
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad {what} '{field}' in mesh descriptor '{desc}'")))
}

impl FromStr for MeshDescriptor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, rest) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("mesh descriptor '{s}' has no ':'")))?;
        if kind == "file" {
            if rest.is_empty() {
                return Err(Error::Parse("empty path in file: descriptor".into()));
            }
            return Ok(MeshDescriptor::File(PathBuf::from(rest)));
        }
        let parts: Vec<&str> = rest.split(':').collect();
        match (kind, parts.as_slice()) {
            ("uniform", [n]) => Ok(MeshDescriptor::Uniform { n: parse_field(n, "n", s)? }),
            ("graded", [beta, n]) => Ok(MeshDescriptor::Graded {
                beta: parse_field(beta, "beta", s)?,
                n: parse_field(n, "n", s)?,
            }),
            ("perturbed", [rho, n, seed]) => Ok(MeshDescriptor::Perturbed {
                rho: parse_field(rho, "rho", s)?,
                n: parse_field(n, "n", s)?,
                seed: parse_field(seed, "seed", s)?,
            }),
            _ => Err(Error::Parse(format!(
                "unrecognized mesh descriptor '{s}' (expected uniform:<n>, graded:<beta>:<n>, \
                 perturbed:<rho>:<n>:<seed> or file:<path>)"
            ))),
        }
    }
}

impl fmt::Display for MeshDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeshDescriptor::Uniform { n } => write!(f, "uniform:{n}"),
            MeshDescriptor::Graded { beta, n } => write!(f, "graded:{beta}:{n}"),
            MeshDescriptor::Perturbed { rho, n, seed } => write!(f, "perturbed:{rho}:{n}:{seed}"),
            MeshDescriptor::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}
