//! A parser for the BVH subset used by common motion-capture exports.
//!
//! Supported: one `ROOT`, nested `JOINT`s, `End Site` leaves, `OFFSET`,
//! `CHANNELS` with 3 or 6 of `{X,Y,Z}{position,rotation}`, and a `MOTION`
//! section with `Frames:`, `Frame Time:` and one line of values per frame.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use nalgebra::{Isometry3, Rotation3, Translation3, UnitQuaternion, Vector3};

use super::MocapError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Channel {
    Xposition,
    Yposition,
    Zposition,
    Xrotation,
    Yrotation,
    Zrotation,
}

impl Channel {
    fn as_str(self) -> &'static str {
        match self {
            Channel::Xposition => "Xposition",
            Channel::Yposition => "Yposition",
            Channel::Zposition => "Zposition",
            Channel::Xrotation => "Xrotation",
            Channel::Yrotation => "Yrotation",
            Channel::Zrotation => "Zrotation",
        }
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Channel {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        Ok(match s {
            "Xposition" => Channel::Xposition,
            "Yposition" => Channel::Yposition,
            "Zposition" => Channel::Zposition,
            "Xrotation" => Channel::Xrotation,
            "Yrotation" => Channel::Yrotation,
            "Zrotation" => Channel::Zrotation,
            _ => return Err(()),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BvhJoint {
    pub name: String,
    /// Index of the parent in [`BvhDocument::joints`]; `None` for the root.
    pub parent: Option<usize>,
    pub offset: [f64; 3],
    /// Channels in declaration order. Rotations are applied in this order.
    pub channels: Vec<Channel>,
    pub end_site: Option<[f64; 3]>,
}

/// A parsed BVH file. Joints are stored depth-first, so a parent always
/// precedes its children.
#[derive(Debug, Clone, PartialEq)]
pub struct BvhDocument {
    pub joints: Vec<BvhJoint>,
    pub frame_time: f64,
    pub frames: Vec<Vec<f64>>,
}

struct Token<'a> {
    line: usize,
    text: &'a str,
}

struct Cursor<'a> {
    tokens: Vec<Token<'a>>,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn last_line(&self) -> usize {
        self.tokens.last().map_or(1, |t| t.line)
    }

    fn next(&mut self, what: &str) -> Result<&Token<'a>, MocapError> {
        let line = self.last_line();
        let tok = self
            .tokens
            .get(self.pos)
            .ok_or_else(|| MocapError::Syntax {
                line,
                msg: format!("unexpected end of input, expected {what}"),
            })?;
        self.pos += 1;
        Ok(tok)
    }

    fn expect(&mut self, keyword: &str) -> Result<usize, MocapError> {
        let tok = self.next(keyword)?;
        if tok.text == keyword {
            Ok(tok.line)
        } else {
            Err(MocapError::Syntax {
                line: tok.line,
                msg: format!("expected `{keyword}`, found `{}`", tok.text),
            })
        }
    }

    fn number<T: FromStr>(&mut self, what: &str) -> Result<T, MocapError> {
        let tok = self.next(what)?;
        tok.text.parse().map_err(|_| MocapError::Syntax {
            line: tok.line,
            msg: format!("expected {what}, found `{}`", tok.text),
        })
    }

    fn vec3(&mut self) -> Result<[f64; 3], MocapError> {
        Ok([
            self.number("offset value")?,
            self.number("offset value")?,
            self.number("offset value")?,
        ])
    }
}

/// Parses BVH text into a [`BvhDocument`].
pub fn parse_bvh(text: &str) -> Result<BvhDocument, MocapError> {
    let tokens = text
        .lines()
        .enumerate()
        .flat_map(|(i, l)| {
            l.split_whitespace().map(move |t| Token {
                line: i + 1,
                text: t,
            })
        })
        .collect();
    let mut cur = Cursor { tokens, pos: 0 };

    cur.expect("HIERARCHY")?;
    cur.expect("ROOT")?;
    let mut joints = Vec::new();
    parse_joint(&mut cur, None, &mut joints)?;

    let tok = cur.next("MOTION")?;
    if tok.text != "MOTION" {
        let msg = if tok.text == "ROOT" {
            "only one ROOT is supported".to_string()
        } else {
            format!("expected `MOTION`, found `{}`", tok.text)
        };
        return Err(MocapError::Syntax {
            line: tok.line,
            msg,
        });
    }
    cur.expect("Frames:")?;
    let declared: usize = cur.number("frame count")?;
    cur.expect("Frame")?;
    let line = cur.expect("Time:")?;
    let frame_time: f64 = cur.number("frame time")?;
    if !(frame_time.is_finite() && frame_time > 0.0) {
        return Err(MocapError::Syntax {
            line,
            msg: format!("frame time must be positive, got {frame_time}"),
        });
    }

    let width: usize = joints.iter().map(|j: &BvhJoint| j.channels.len()).sum();
    let mut frames: Vec<Vec<f64>> = Vec::with_capacity(declared);
    let rest = &cur.tokens[cur.pos..];
    let mut i = 0;
    while i < rest.len() {
        let line = rest[i].line;
        let mut values = Vec::with_capacity(width);
        while i < rest.len() && rest[i].line == line {
            let v: f64 = rest[i].text.parse().map_err(|_| MocapError::Syntax {
                line,
                msg: format!("expected channel value, found `{}`", rest[i].text),
            })?;
            values.push(v);
            i += 1;
        }
        if values.len() != width {
            return Err(MocapError::ChannelCount {
                line,
                expected: width,
                found: values.len(),
            });
        }
        frames.push(values);
    }
    if frames.len() != declared {
        return Err(MocapError::FrameCount {
            declared,
            found: frames.len(),
        });
    }

    Ok(BvhDocument {
        joints,
        frame_time,
        frames,
    })
}

fn parse_joint(
    cur: &mut Cursor<'_>,
    parent: Option<usize>,
    joints: &mut Vec<BvhJoint>,
) -> Result<(), MocapError> {
    let name = cur.next("joint name")?.text.to_string();
    let open_line = cur.expect("{")?;
    let index = joints.len();
    joints.push(BvhJoint {
        name,
        parent,
        offset: [0.0; 3],
        channels: Vec::new(),
        end_site: None,
    });
    let mut have_offset = false;
    let mut have_channels = false;

    loop {
        let tok = cur.next("`}`")?;
        let line = tok.line;
        match tok.text {
            "OFFSET" => {
                joints[index].offset = cur.vec3()?;
                have_offset = true;
            }
            "CHANNELS" => {
                let n: usize = cur.number("channel count")?;
                if n != 3 && n != 6 {
                    return Err(MocapError::Syntax {
                        line,
                        msg: format!("CHANNELS must declare 3 or 6 channels, got {n}"),
                    });
                }
                for _ in 0..n {
                    let tok = cur.next("channel name")?;
                    let ch = tok
                        .text
                        .parse()
                        .map_err(|_| MocapError::UnsupportedChannel {
                            line: tok.line,
                            name: tok.text.to_string(),
                        })?;
                    joints[index].channels.push(ch);
                }
                have_channels = true;
            }
            "JOINT" => parse_joint(cur, Some(index), joints)?,
            "End" => {
                cur.expect("Site")?;
                cur.expect("{")?;
                cur.expect("OFFSET")?;
                let off = cur.vec3()?;
                cur.expect("}")?;
                if joints[index].end_site.replace(off).is_some() {
                    return Err(MocapError::Syntax {
                        line,
                        msg: "joint has more than one End Site".into(),
                    });
                }
            }
            "}" => break,
            other => {
                return Err(MocapError::Syntax {
                    line,
                    msg: format!("unexpected `{other}` in joint block"),
                })
            }
        }
    }
    if !have_offset || !have_channels {
        return Err(MocapError::Syntax {
            line: open_line,
            msg: format!(
                "joint `{}` needs both OFFSET and CHANNELS",
                joints[index].name
            ),
        });
    }
    Ok(())
}

impl BvhDocument {
    pub fn joint_index(&self, name: &str) -> Option<usize> {
        self.joints.iter().position(|j| j.name == name)
    }

    pub fn channel_count(&self) -> usize {
        self.joints.iter().map(|j| j.channels.len()).sum()
    }

    /// Forward kinematics: world-space position of every joint for one
    /// frame, in the file's own axes and units.
    ///
    /// Each joint's local transform is a translation by `OFFSET` plus any
    /// position channels, followed by the rotation channels composed in
    /// declaration order.
    pub fn world_positions(&self, frame: usize) -> Vec<Vector3<f64>> {
        let values = &self.frames[frame];
        let mut world: Vec<Isometry3<f64>> = Vec::with_capacity(self.joints.len());
        let mut k = 0;
        for joint in &self.joints {
            let mut translation = Vector3::from(joint.offset);
            let mut rotation = Rotation3::identity();
            for ch in &joint.channels {
                let v = values[k];
                k += 1;
                match ch {
                    Channel::Xposition => translation.x += v,
                    Channel::Yposition => translation.y += v,
                    Channel::Zposition => translation.z += v,
                    Channel::Xrotation => {
                        rotation *= Rotation3::from_axis_angle(&Vector3::x_axis(), v.to_radians())
                    }
                    Channel::Yrotation => {
                        rotation *= Rotation3::from_axis_angle(&Vector3::y_axis(), v.to_radians())
                    }
                    Channel::Zrotation => {
                        rotation *= Rotation3::from_axis_angle(&Vector3::z_axis(), v.to_radians())
                    }
                }
            }
            let local = Isometry3::from_parts(
                Translation3::from(translation),
                UnitQuaternion::from_rotation_matrix(&rotation),
            );
            let global = match joint.parent {
                Some(p) => world[p] * local,
                None => local,
            };
            world.push(global);
        }
        world.iter().map(|iso| iso.translation.vector).collect()
    }

    /// Serializes back to BVH text. Parsing the output yields an equal
    /// document.
    pub fn to_bvh_string(&self) -> String {
        let mut out = String::from("HIERARCHY\n");
        self.write_joint(&mut out, 0, 0);
        let _ = writeln!(out, "MOTION");
        let _ = writeln!(out, "Frames: {}", self.frames.len());
        let _ = writeln!(out, "Frame Time: {}", self.frame_time);
        for frame in &self.frames {
            let line: Vec<String> = frame.iter().map(|v| v.to_string()).collect();
            let _ = writeln!(out, "{}", line.join(" "));
        }
        out
    }

    fn write_joint(&self, out: &mut String, index: usize, depth: usize) {
        let pad = "\t".repeat(depth);
        let joint = &self.joints[index];
        let kind = if joint.parent.is_none() {
            "ROOT"
        } else {
            "JOINT"
        };
        let [x, y, z] = joint.offset;
        let _ = writeln!(out, "{pad}{kind} {}", joint.name);
        let _ = writeln!(out, "{pad}{{");
        let _ = writeln!(out, "{pad}\tOFFSET {x} {y} {z}");
        let chans: Vec<&str> = joint.channels.iter().map(|c| c.as_str()).collect();
        let _ = writeln!(out, "{pad}\tCHANNELS {} {}", chans.len(), chans.join(" "));
        for (child, _) in self
            .joints
            .iter()
            .enumerate()
            .filter(|(_, j)| j.parent == Some(index))
        {
            self.write_joint(out, child, depth + 1);
        }
        if let Some([x, y, z]) = joint.end_site {
            let _ = writeln!(out, "{pad}\tEnd Site");
            let _ = writeln!(out, "{pad}\t{{");
            let _ = writeln!(out, "{pad}\t\tOFFSET {x} {y} {z}");
            let _ = writeln!(out, "{pad}\t}}");
        }
        let _ = writeln!(out, "{pad}}}");
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const MINIMAL: &str = "HIERARCHY
ROOT Hips
{
  OFFSET 0 0 0
  CHANNELS 6 Xposition Yposition Zposition Zrotation Xrotation Yrotation
  End Site
  {
    OFFSET 0 5 0
  }
}
MOTION
Frames: 1
Frame Time: 0.0083333
0 0 0 0 0 0
";

    const TWO_JOINT: &str = "HIERARCHY
ROOT Hips
{
  OFFSET 0 0 0
  CHANNELS 6 Xposition Yposition Zposition Zrotation Xrotation Yrotation
  JOINT Chest
  {
    OFFSET 0 10 0
    CHANNELS 3 Zrotation Xrotation Yrotation
    End Site
    {
      OFFSET 0 4 0
    }
  }
}
MOTION
Frames: 2
Frame Time: 0.5
1 2 3 0 0 0 0 0 0
0 0 0 90 0 0 0 0 0
";

    #[test]
    fn minimal_document() {
        let doc = parse_bvh(MINIMAL).unwrap();
        assert_eq!(doc.joints.len(), 1);
        assert_eq!(doc.frames.len(), 1);
        assert_eq!(doc.joints[0].end_site, Some([0.0, 5.0, 0.0]));
        assert_eq!(doc.world_positions(0), vec![Vector3::zeros()]);
    }

    #[test]
    fn rotation_order_preserved() {
        let doc = parse_bvh(MINIMAL).unwrap();
        assert_eq!(
            doc.joints[0].channels[3..],
            [Channel::Zrotation, Channel::Xrotation, Channel::Yrotation]
        );
    }

    #[test]
    fn child_offset_adds_to_parent() {
        let doc = parse_bvh(TWO_JOINT).unwrap();
        let p = doc.world_positions(0);
        assert_eq!(p[0], Vector3::new(1.0, 2.0, 3.0));
        assert_eq!(p[1], Vector3::new(1.0, 12.0, 3.0));
        // 90 degrees about z carries +y onto -x
        let p = doc.world_positions(1);
        assert!((p[1] - Vector3::new(-10.0, 0.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn too_few_motion_lines() {
        let text = MINIMAL.replace("Frames: 1", "Frames: 2");
        assert!(matches!(
            parse_bvh(&text),
            Err(MocapError::FrameCount {
                declared: 2,
                found: 1
            })
        ));
    }

    #[test]
    fn short_motion_line() {
        let text = MINIMAL.replace("0 0 0 0 0 0\n", "0 0 0 0 0\n");
        assert!(matches!(
            parse_bvh(&text),
            Err(MocapError::ChannelCount {
                line: 14,
                expected: 6,
                found: 5
            })
        ));
    }

    #[test]
    fn unsupported_channel() {
        let text = MINIMAL.replace("Yrotation\n", "Wrotation\n");
        assert!(matches!(
            parse_bvh(&text),
            Err(MocapError::UnsupportedChannel { line: 5, .. })
        ));
    }

    #[test]
    fn syntax_error_has_line() {
        let text = MINIMAL.replace("OFFSET 0 5 0", "OFFSET 0 five 0");
        match parse_bvh(&text) {
            Err(MocapError::Syntax { line, .. }) => assert_eq!(line, 8),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn second_root_rejected() {
        let text = TWO_JOINT.replace("MOTION", "ROOT Other\n{\n}\nMOTION");
        assert!(matches!(parse_bvh(&text), Err(MocapError::Syntax { .. })));
    }

    #[test]
    fn non_positive_frame_time_rejected() {
        let text = MINIMAL.replace("0.0083333", "0");
        assert!(matches!(
            parse_bvh(&text),
            Err(MocapError::Syntax { line: 13, .. })
        ));
    }

    proptest! {
        #[test]
        fn serialize_parse_fixed_point(
            offsets in prop::collection::vec(prop::array::uniform3(-100.0f64..100.0), 2..6),
            frames in prop::collection::vec(prop::collection::vec(-180.0f64..180.0, 6 + 3 * 5), 0..4),
            frame_time in 0.001f64..1.0,
        ) {
            let n = offsets.len();
            let joints: Vec<BvhJoint> = offsets
                .iter()
                .enumerate()
                .map(|(i, off)| BvhJoint {
                    name: format!("J{i}"),
                    parent: if i == 0 { None } else { Some((i - 1) / 2) },
                    offset: *off,
                    channels: if i == 0 {
                        vec![Channel::Xposition, Channel::Yposition, Channel::Zposition,
                             Channel::Zrotation, Channel::Yrotation, Channel::Xrotation]
                    } else {
                        vec![Channel::Yrotation, Channel::Xrotation, Channel::Zrotation]
                    },
                    end_site: if i + 1 == n { Some([0.0, 1.5, -2.0]) } else { None },
                })
                .collect();
            // reorder depth-first so the serializer's traversal matches storage order
            let doc = BvhDocument { joints, frame_time, frames: vec![] };
            let reparsed = parse_bvh(&doc.to_bvh_string()).unwrap();
            let width = reparsed.channel_count();
            let doc = BvhDocument {
                frames: frames.iter().map(|f| f[..width].to_vec()).collect(),
                ..reparsed
            };
            let text = doc.to_bvh_string();
            let again = parse_bvh(&text).unwrap();
            prop_assert_eq!(&again, &doc);
            prop_assert_eq!(again.to_bvh_string(), text);
        }
    }
}
