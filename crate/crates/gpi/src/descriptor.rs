//! Algebra description files (JSON) and the short `kind:key=value,...` forms used on the command line.

use std::fs;
use std::path::Path;

use gpi_core::algebra::{
    build_block_triangular, build_grassmann, build_matrix_algebra, build_matrix_over, BlockShape, GradingMap,
    GrassmannGrading, GrassmannSpec, StructureConstantAlgebra,
};
use gpi_core::identities::GrassmannHandle;
use gpi_core::{CoreError, GroupElement, GroupSpec};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Elementary grading: one residue tuple per row/column index.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementaryGrading {
    pub targets: Vec<Vec<u32>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum GrassmannGradingDesc {
    Natural,
    Infty,
    Kstar { k: usize },
    Explicit { bits: Vec<u32> },
    Trivial,
}

impl GrassmannGradingDesc {
    pub fn to_core(&self) -> GrassmannGrading {
        match self {
            Self::Natural => GrassmannGrading::Natural,
            Self::Infty => GrassmannGrading::Infty,
            Self::Kstar { k } => GrassmannGrading::KStar(*k),
            Self::Explicit { bits } => GrassmannGrading::Explicit(bits.clone()),
            Self::Trivial => GrassmannGrading::Trivial,
        }
    }

    pub fn group_orders(&self) -> Vec<u32> {
        match self {
            Self::Trivial => Vec::new(),
            _ => vec![2],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AlgebraDescriptor {
    Matrix { n: usize, group: Vec<u32>, grading: ElementaryGrading },
    Grassmann { generators: usize, group: Vec<u32>, grading: GrassmannGradingDesc },
    BlockTriangular { blocks: Vec<usize>, group: Vec<u32>, grading: ElementaryGrading },
    MatrixOver { blocks: Vec<usize>, inner: Box<AlgebraDescriptor> },
}

pub fn group_from_orders(orders: &[u32]) -> Result<GroupSpec, CliError> {
    if orders.is_empty() {
        Ok(GroupSpec::trivial())
    } else {
        Ok(GroupSpec::new(orders.to_vec())?)
    }
}

/// The group element with these residues; each must be below its cyclic order.
pub fn element_of(group: &GroupSpec, residues: &[u32]) -> Result<GroupElement, CliError> {
    if let Some((x, o)) = residues.iter().zip(group.cyclic_orders()).find(|(x, o)| **x >= **o) {
        return Err(CliError::Usage(format!("residue {x} out of range for Z{o}")));
    }
    Ok(group.element(&residues.iter().map(|&r| i64::from(r)).collect::<Vec<_>>())?)
}

fn grading_map(g: &ElementaryGrading, group: &GroupSpec) -> Result<GradingMap, CliError> {
    let targets = g.targets.iter().map(|t| element_of(group, t)).collect::<Result<Vec<_>, _>>()?;
    Ok(GradingMap::new(targets)?)
}

impl AlgebraDescriptor {
    pub fn group(&self) -> Result<GroupSpec, CliError> {
        match self {
            Self::Matrix { group, .. } | Self::Grassmann { group, .. } | Self::BlockTriangular { group, .. } => {
                group_from_orders(group)
            }
            Self::MatrixOver { inner, .. } => inner.group(),
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if let Self::Grassmann { group, grading, .. } = self {
            if *group != grading.group_orders() {
                return Err(CliError::Usage(format!(
                    "grassmann grading {grading:?} needs group {:?}, found {group:?}",
                    grading.group_orders()
                )));
            }
        }
        if let Self::MatrixOver { inner, .. } = self {
            if matches!(inner.as_ref(), Self::MatrixOver { .. }) {
                return Err(CliError::Usage("nested matrix_over descriptors are not supported".into()));
            }
            inner.validate()?;
        }
        Ok(())
    }

    pub fn build(&self) -> Result<StructureConstantAlgebra, CliError> {
        self.validate()?;
        let group = self.group()?;
        Ok(match self {
            Self::Matrix { n, grading, .. } => build_matrix_algebra(*n, &grading_map(grading, &group)?, &group)?,
            Self::Grassmann { generators, grading, .. } => {
                build_grassmann(&GrassmannSpec::new(*generators, grading.to_core()))?
            }
            Self::BlockTriangular { blocks, grading, .. } => {
                build_block_triangular(&BlockShape::new(blocks.clone())?, &grading_map(grading, &group)?, &group)?
            }
            Self::MatrixOver { blocks, inner } => build_matrix_over(&inner.build()?, &BlockShape::new(blocks.clone())?)?,
        })
    }

    /// Fast-row handle when the algebra is `E_N` or matrices over it.
    pub fn grassmann_handle(&self) -> Option<GrassmannHandle> {
        match self {
            Self::Grassmann { generators, grading, .. } => {
                Some(GrassmannHandle::plain(GrassmannSpec::new(*generators, grading.to_core())))
            }
            Self::MatrixOver { blocks, inner } => match inner.as_ref() {
                Self::Grassmann { generators, grading, .. } => Some(GrassmannHandle::matrix(
                    GrassmannSpec::new(*generators, grading.to_core()),
                    BlockShape::new(blocks.clone()).ok()?,
                )),
                _ => None,
            },
            _ => None,
        }
    }

    /// Canonical JSON text; parsing it back and printing again gives the same bytes.
    pub fn to_canonical_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("descriptor serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let d: Self = serde_json::from_str(text).map_err(|e| CliError::Usage(format!("bad algebra descriptor: {e}")))?;
        d.validate()?;
        Ok(d)
    }

    /// Reads a descriptor file, or parses a short form such as `grassmann:N=6,deg=natural`.
    pub fn load(arg: &str) -> Result<Self, CliError> {
        let path = Path::new(arg);
        if path.is_file() {
            let text = fs::read_to_string(path)?;
            return Self::from_json(&text);
        }
        Self::parse_short(arg)
    }

    /// Short forms:
    /// `grassmann:N=6,deg=natural|infty|trivial|kstar,k=1`,
    /// `matrix:targets=0;1` (or `0,1` for a cyclic group), optional `group=2`.
    pub fn parse_short(s: &str) -> Result<Self, CliError> {
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        let kv = parse_kv(rest)?;
        match kind {
            "grassmann" => {
                let n = kv
                    .get("N")
                    .or_else(|| kv.get("n"))
                    .ok_or_else(|| CliError::Usage("grassmann descriptor needs N=<generators>".into()))?;
                let generators = parse_usize(n, "N")?;
                let grading = parse_grassmann_grading(&kv)?;
                Ok(Self::Grassmann { generators, group: grading.group_orders(), grading })
            }
            "matrix" => {
                let group = parse_orders(kv.get("group").map_or("2", String::as_str))?;
                let targets = parse_residue_list(
                    kv.get("targets").ok_or_else(|| CliError::Usage("matrix descriptor needs targets=".into()))?,
                    group.len(),
                )?;
                Ok(Self::Matrix { n: targets.len(), group, grading: ElementaryGrading { targets } })
            }
            other => Err(CliError::Usage(format!("unknown algebra kind '{other}' (use a JSON file for {other})"))),
        }
    }
}

/// `key=value` pairs separated by commas; a bare item continues the previous value
/// (so `targets=0,1` and `deg=kstar,k=1` both work).
pub fn parse_kv(s: &str) -> Result<std::collections::BTreeMap<String, String>, CliError> {
    let mut out = std::collections::BTreeMap::new();
    let mut last: Option<String> = None;
    for item in s.split(',').map(str::trim).filter(|x| !x.is_empty()) {
        match item.split_once('=') {
            Some((k, v)) => {
                out.insert(k.trim().to_string(), v.trim().to_string());
                last = Some(k.trim().to_string());
            }
            None => {
                let k = last.clone().ok_or_else(|| CliError::Usage(format!("expected key=value, got '{item}'")))?;
                let v: &mut String = out.get_mut(&k).expect("key just inserted");
                v.push(',');
                v.push_str(item);
            }
        }
    }
    Ok(out)
}

pub fn parse_grassmann_grading(kv: &std::collections::BTreeMap<String, String>) -> Result<GrassmannGradingDesc, CliError> {
    let deg = kv.get("deg").map_or("natural", String::as_str);
    Ok(match deg {
        "natural" => GrassmannGradingDesc::Natural,
        "infty" | "inf" => GrassmannGradingDesc::Infty,
        "trivial" | "none" => GrassmannGradingDesc::Trivial,
        "kstar" => {
            let k = kv.get("k").ok_or_else(|| CliError::Usage("deg=kstar needs k=<k>".into()))?;
            GrassmannGradingDesc::Kstar { k: parse_usize(k, "k")? }
        }
        "k" => {
            return Err(CliError::Core(CoreError::Unsupported(
                "generators g_m unspecified in source".into(),
            )))
        }
        other => return Err(CliError::Usage(format!("unknown Grassmann grading '{other}'"))),
    })
}

pub fn parse_usize(s: &str, what: &str) -> Result<usize, CliError> {
    s.trim().parse().map_err(|_| CliError::Usage(format!("{what}: expected a nonnegative integer, got '{s}'")))
}

/// `2` or `2,3`; `trivial`, `none`, `1` and the empty string give the trivial group.
pub fn parse_orders(s: &str) -> Result<Vec<u32>, CliError> {
    let s = s.trim();
    if s.is_empty() || s == "trivial" || s == "none" || s == "1" {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|x| x.trim().parse::<u32>().map_err(|_| CliError::Usage(format!("bad group order '{x}'"))))
        .collect()
}

/// Degrees separated by `;`, residues inside a degree by `,`. For cyclic groups a plain
/// comma list gives one residue per degree; for the trivial group any list of `0`/`e`
/// gives that many identity degrees.
pub fn parse_residue_list(s: &str, rank: usize) -> Result<Vec<Vec<u32>>, CliError> {
    let s = s.trim();
    if s.is_empty() {
        return Err(CliError::Usage("empty degree list".into()));
    }
    let items: Vec<&str> = if s.contains(';') || rank > 1 { s.split(';').collect() } else { s.split(',').collect() };
    items
        .into_iter()
        .map(|item| {
            let item = item.trim().trim_start_matches('(').trim_end_matches(')');
            if rank == 0 {
                return match item {
                    "0" | "e" | "" => Ok(Vec::new()),
                    _ => Err(CliError::Usage(format!("degree '{item}' is not in the trivial group"))),
                };
            }
            item.split(',')
                .map(|r| r.trim().parse::<u32>().map_err(|_| CliError::Usage(format!("bad residue '{r}'"))))
                .collect::<Result<Vec<u32>, CliError>>()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_round_trip() {
        let d = AlgebraDescriptor::MatrixOver {
            blocks: vec![1, 1],
            inner: Box::new(AlgebraDescriptor::Grassmann {
                generators: 4,
                group: vec![2],
                grading: GrassmannGradingDesc::Kstar { k: 1 },
            }),
        };
        let text = d.to_canonical_json();
        let back = AlgebraDescriptor::from_json(&text).unwrap();
        assert_eq!(back, d);
        assert_eq!(back.to_canonical_json(), text);
        assert_eq!(back.build().unwrap().dim(), 3 * 16);
    }

    #[test]
    fn short_forms() {
        let d = AlgebraDescriptor::parse_short("grassmann:N=6,deg=kstar,k=1").unwrap();
        assert_eq!(
            d,
            AlgebraDescriptor::Grassmann { generators: 6, group: vec![2], grading: GrassmannGradingDesc::Kstar { k: 1 } }
        );
        let m = AlgebraDescriptor::parse_short("matrix:targets=0,1").unwrap();
        assert_eq!(m.build().unwrap().dim(), 4);
        assert!(AlgebraDescriptor::parse_short("grassmann:deg=natural").is_err());
        assert!(AlgebraDescriptor::parse_short("lie:n=3").is_err());
    }

    #[test]
    fn group_mismatch_rejected() {
        let text = r#"{"kind":"grassmann","generators":4,"group":[],"grading":{"type":"natural"}}"#;
        assert!(AlgebraDescriptor::from_json(text).is_err());
    }

    #[test]
    fn residue_lists() {
        assert_eq!(parse_residue_list("0,1", 1).unwrap(), vec![vec![0], vec![1]]);
        assert_eq!(parse_residue_list("0,1;1,1", 2).unwrap(), vec![vec![0, 1], vec![1, 1]]);
        assert_eq!(parse_residue_list("0,0,0", 0).unwrap(), vec![Vec::<u32>::new(); 3]);
        assert!(parse_residue_list("x", 1).is_err());
    }
}
