//! Canonical diagram fixtures. Arc labels on the two-component link follow
//! the labelling used in the worked structure tables, so tests can compare
//! coefficients literally.

pub const HOPF_RIGHT: &str = r#"{
  "side": "right", "n": 2,
  "events": [{"cross": 2, "id": "c1", "sign": "-", "over": "pos"},
             {"cap": 1}, {"cap": 1}],
  "arcs": {"0": "x4", "1": "x3", "2": "x2", "3": "x1"}
}"#;

pub const HOPF_LEFT: &str = r#"{
  "side": "left", "n": 2,
  "events": [{"cross": 2, "id": "c1", "sign": "-", "over": "pos"},
             {"cap": 1}, {"cap": 1}],
  "arcs": {"0": "x8", "1": "x7", "2": "x6", "3": "x5"}
}"#;

/// The two-component fixture with a trivial clasp inserted: same tangle as
/// HOPF_RIGHT after a Reidemeister 2 move on the middle strands.
pub const HOPF_RIGHT_R2: &str = r#"{
  "side": "right", "n": 2,
  "events": [{"cross": 2, "id": "c1", "sign": "-", "over": "pos"},
             {"cross": 2, "id": "c2", "sign": "+", "over": "neg"},
             {"cross": 2, "id": "c3", "sign": "-", "over": "pos"},
             {"cap": 1}, {"cap": 1}],
  "arcs": {"0": "y1", "1": "y2", "2": "y3", "3": "y4",
           "4": "y5", "5": "y6", "6": "y7", "7": "y8"}
}"#;

pub const UNKNOT0_LEFT: &str =
    r#"{"side": "left", "n": 1, "events": [{"cap": 1}], "arcs": {"0": "a1"}}"#;
pub const UNKNOT0_RIGHT: &str = r#"{"side": "right", "n": 1, "events": [{"cap": 1}]}"#;

pub const UNKNOT1P_RIGHT: &str = r#"{
  "side": "right", "n": 1,
  "events": [{"cross": 1, "id": "c1", "sign": "+", "over": "pos"}, {"cap": 1}]
}"#;

pub const UNKNOT1N_RIGHT: &str = r#"{
  "side": "right", "n": 1,
  "events": [{"cross": 1, "id": "c1", "sign": "-", "over": "neg"}, {"cap": 1}]
}"#;

/// Unknot with two crossings forming a clasp that undoes itself.
pub const UNKNOT2_RIGHT: &str = r#"{
  "side": "right", "n": 1,
  "events": [{"cross": 1, "id": "c1", "sign": "+", "over": "pos"},
             {"cross": 1, "id": "c2", "sign": "-", "over": "neg"},
             {"cap": 1}]
}"#;

/// Five-crossing right tangle whose reduced structure exhibits the
/// inverse-weight coefficient pattern: two crossings change the induced
/// matching, three split off free circles, and the surviving two-crossing
/// transitions carry one or two inverse free-circle weights. Found by a
/// search over small Morse words.
pub const EXAMPLE2_RIGHT: &str = r#"{
  "side": "right", "n": 2,
  "events": [{"cross": 2, "id": "c1", "sign": "-", "over": "pos"},
             {"cross": 1, "id": "c2", "sign": "-", "over": "neg"},
             {"cross": 2, "id": "c3", "sign": "-", "over": "pos"},
             {"cross": 1, "id": "c4", "sign": "-", "over": "pos"},
             {"cross": 1, "id": "c5", "sign": "-", "over": "pos"},
             {"cap": 2}, {"cap": 1}]
}"#;

/// All named fixtures: (file stem, JSON body).
pub fn all() -> Vec<(&'static str, &'static str)> {
    vec![
        ("hopf_left", HOPF_LEFT),
        ("hopf_right", HOPF_RIGHT),
        ("hopf_right_r2", HOPF_RIGHT_R2),
        ("unknot0_left", UNKNOT0_LEFT),
        ("unknot0_right", UNKNOT0_RIGHT),
        ("unknot1p_right", UNKNOT1P_RIGHT),
        ("unknot1n_right", UNKNOT1N_RIGHT),
        ("unknot2_right", UNKNOT2_RIGHT),
        ("example2_right", EXAMPLE2_RIGHT),
    ]
}

/// Resolve a fixture *name* (as used by the command line) to its files.
pub fn files_for(name: &str) -> Option<Vec<(&'static str, &'static str)>> {
    let stems: &[&str] = match name {
        "hopf_left" => &["hopf_left"],
        "hopf_right" => &["hopf_right"],
        "hopf_right_r2" => &["hopf_right_r2"],
        "unknot0" => &["unknot0_left", "unknot0_right"],
        "unknot1p" => &["unknot0_left", "unknot1p_right"],
        "unknot1n" => &["unknot0_left", "unknot1n_right"],
        "unknot2" => &["unknot0_left", "unknot2_right"],
        "example2_right" => &["example2_right"],
        _ => return None,
    };
    let all = all();
    Some(
        stems
            .iter()
            .map(|s| *all.iter().find(|(k, _)| k == s).unwrap())
            .collect(),
    )
}
