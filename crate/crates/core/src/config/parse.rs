use serde::{Deserialize, Serialize};

use super::{BaseSurface, ConfigError, Configuration, CurveDecoration, CurveKind, Point, PointId};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    surface: SurfaceDoc,
    points: Vec<PointDoc>,
    #[serde(default)]
    curves: Vec<CurveDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum SurfaceDoc {
    P2,
    Hirzebruch {
        #[serde(default)]
        delta: Option<DeltaDoc>,
    },
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum DeltaDoc {
    Concrete(u32),
    Symbolic(SymbolicTag),
}

#[derive(Debug, Serialize, Deserialize)]
enum SymbolicTag {
    #[serde(rename = "symbolic")]
    Symbolic,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PointDoc {
    id: PointId,
    #[serde(default)]
    parent: Option<PointId>,
    #[serde(default)]
    extra_proximity: Option<PointId>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CurveDoc {
    name: String,
    kind: CurveKind,
    points: Vec<PointId>,
}

pub(super) fn from_json(text: &str) -> Result<Configuration, ConfigError> {
    let doc: Document = serde_json::from_str(text).map_err(|e| ConfigError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let base = match doc.surface {
        SurfaceDoc::P2 => BaseSurface::P2,
        SurfaceDoc::Hirzebruch { delta: Some(DeltaDoc::Concrete(d)) } => BaseSurface::hirzebruch(d),
        SurfaceDoc::Hirzebruch { .. } => BaseSurface::symbolic(),
    };
    let points = doc
        .points
        .into_iter()
        .map(|p| Point { id: p.id, parent: p.parent, extra_proximity: p.extra_proximity })
        .collect();
    let curves = doc
        .curves
        .into_iter()
        .map(|c| CurveDecoration { name: c.name, kind: c.kind, points: c.points })
        .collect();
    Configuration::new(base, points, curves)
}

pub(super) fn to_json(c: &Configuration) -> String {
    let surface = match c.base() {
        BaseSurface::P2 => SurfaceDoc::P2,
        BaseSurface::Hirzebruch { delta: Some(d) } => SurfaceDoc::Hirzebruch { delta: Some(DeltaDoc::Concrete(d)) },
        BaseSurface::Hirzebruch { delta: None } => {
            SurfaceDoc::Hirzebruch { delta: Some(DeltaDoc::Symbolic(SymbolicTag::Symbolic)) }
        }
    };
    let doc = Document {
        surface,
        points: c
            .points()
            .iter()
            .map(|p| PointDoc { id: p.id.clone(), parent: p.parent.clone(), extra_proximity: p.extra_proximity.clone() })
            .collect(),
        curves: c
            .curves()
            .iter()
            .map(|cv| CurveDoc { name: cv.name.clone(), kind: cv.kind, points: cv.points.clone() })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("configuration documents always serialize")
}
