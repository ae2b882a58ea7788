//! PD text codes and the JSON diagram format.

use serde::{Deserialize, Serialize};

use super::{ArcLabel, ArrowKind, Diagram, DiagramError, LoopLabel};

/// Parse a text PD code such as `PD[X(1,4,2,3),X(3,2,4,1)]`. Whitespace is
/// ignored. `PD[]` denotes a crossingless unknot (one free loop, label 0).
pub fn parse_pd(input: &str) -> Result<Diagram, DiagramError> {
    let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
    let body = s
        .strip_prefix("PD[")
        .and_then(|t| t.strip_suffix(']'))
        .ok_or_else(|| DiagramError::Parse("expected PD[...]".into()))?;
    if body.is_empty() {
        return Diagram::new(vec![], vec![0], None);
    }
    let mut crossings = Vec::new();
    let mut rest = body;
    loop {
        let t = rest
            .strip_prefix("X(")
            .ok_or_else(|| DiagramError::Parse(format!("expected X(...) at `{rest}`")))?;
        let (args, tail) = t
            .split_once(')')
            .ok_or_else(|| DiagramError::Parse("unterminated X(".into()))?;
        let labels: Vec<ArcLabel> = args
            .split(',')
            .map(|x| {
                x.parse::<ArcLabel>()
                    .map_err(|_| DiagramError::Parse(format!("bad arc label `{x}`")))
            })
            .collect::<Result<_, _>>()?;
        let slots: [ArcLabel; 4] = labels
            .try_into()
            .map_err(|_| DiagramError::Parse("X takes exactly 4 labels".into()))?;
        crossings.push((slots, ArrowKind::Single));
        match tail.strip_prefix(',') {
            Some(more) => rest = more,
            None if tail.is_empty() => break,
            None => return Err(DiagramError::Parse(format!("trailing `{tail}`"))),
        }
    }
    Diagram::new(crossings, vec![], None)
}

/// JSON shape of a diagram. `crossings[i]` lists the four arc labels of
/// crossing i counterclockwise from the incoming under-strand; `arrows`
/// defaults to all `single`; `components` optionally lists components in
/// travel order to orient strands that never pass under; `free_loops`
/// names crossingless circles.
#[derive(Serialize, Deserialize, Clone, Debug, Default)]
pub struct DiagramJson {
    pub crossings: Vec<[ArcLabel; 4]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arrows: Option<Vec<ArrowJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub components: Option<Vec<Vec<ArcLabel>>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub free_loops: Vec<LoopLabel>,
}

#[derive(Serialize, Deserialize, Clone, Copy, Debug, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum ArrowJson {
    Single,
    Double,
}

impl From<ArrowJson> for ArrowKind {
    fn from(a: ArrowJson) -> Self {
        match a {
            ArrowJson::Single => ArrowKind::Single,
            ArrowJson::Double => ArrowKind::Double,
        }
    }
}

impl From<ArrowKind> for ArrowJson {
    fn from(a: ArrowKind) -> Self {
        match a {
            ArrowKind::Single => ArrowJson::Single,
            ArrowKind::Double => ArrowJson::Double,
        }
    }
}

impl DiagramJson {
    pub fn to_diagram(&self) -> Result<Diagram, DiagramError> {
        let arrows = match &self.arrows {
            Some(v) => {
                if v.len() != self.crossings.len() {
                    return Err(DiagramError::Parse(
                        "arrows length must match crossings".into(),
                    ));
                }
                v.iter().map(|&a| a.into()).collect()
            }
            None => vec![ArrowKind::Single; self.crossings.len()],
        };
        let crossings = self
            .crossings
            .iter()
            .zip(arrows)
            .map(|(&slots, arrow)| (slots, arrow))
            .collect();
        Diagram::new(crossings, self.free_loops.clone(), self.components.as_deref())
    }

    pub fn from_diagram(d: &Diagram) -> DiagramJson {
        let arrows = d.arrows();
        let all_single = arrows.iter().all(|&a| a == ArrowKind::Single);
        DiagramJson {
            crossings: d.crossings().iter().map(|c| c.slots).collect(),
            arrows: if all_single {
                None
            } else {
                Some(arrows.into_iter().map(Into::into).collect())
            },
            components: Some(d.components()),
            free_loops: d.free_loops().to_vec(),
        }
    }
}

/// Parse either format: JSON if the input starts with `{`, else a PD code.
pub fn parse_any(input: &str) -> Result<Diagram, DiagramError> {
    let t = input.trim_start();
    if t.starts_with('{') {
        let j: DiagramJson =
            serde_json::from_str(t).map_err(|e| DiagramError::Parse(e.to_string()))?;
        j.to_diagram()
    } else {
        parse_pd(input)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_and_json_agree() {
        let d1 = parse_pd("PD[X(1,4,2,3), X(3,2,4,1)]").unwrap();
        let j = DiagramJson {
            crossings: vec![[1, 4, 2, 3], [3, 2, 4, 1]],
            ..Default::default()
        };
        let d2 = j.to_diagram().unwrap();
        assert_eq!(d1.signs(), d2.signs());
        assert_eq!(d1.components(), d2.components());
    }

    #[test]
    fn empty_pd_is_unknot() {
        let d = parse_pd("PD[]").unwrap();
        assert_eq!(d.n_crossings(), 0);
        assert_eq!(d.free_loops(), &[0]);
        assert_eq!(d.component_count(), 1);
    }

    #[test]
    fn json_round_trip() {
        let d = parse_pd("PD[X(1,4,2,5),X(3,6,4,1),X(5,2,6,3)]").unwrap();
        let j = DiagramJson::from_diagram(&d);
        let text = serde_json::to_string(&j).unwrap();
        let d2 = parse_any(&text).unwrap();
        assert_eq!(d.signs(), d2.signs());
        assert_eq!(d.components(), d2.components());
    }

    #[test]
    fn bad_inputs_reported() {
        assert!(parse_pd("X(1,2,3,4)").is_err());
        assert!(parse_pd("PD[X(1,2,3)]").is_err());
        assert!(parse_pd("PD[X(1,2,3,4,5)]").is_err());
    }
}
