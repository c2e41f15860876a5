use std::fmt::Write as _;

use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;

use super::model::{Bounds, NodeId, OsmModel, Tags};
use super::OsmError;
use crate::geo::GeoPoint;

const GENERATOR: &str = "cctv-router";

/// Parses an OSM XML document.
///
/// Consecutive duplicate node references in a way are collapsed. Top-level
/// elements other than `bounds`, `node` and `way` are kept verbatim.
pub fn parse_osm(xml: &[u8]) -> Result<OsmModel, OsmError> {
    let mut reader = Reader::from_reader(xml);
    reader.config_mut().trim_text(true);

    let mut model = OsmModel::new();
    let mut seen_root = false;
    let mut current: Option<Element> = None;

    loop {
        let before = reader.buffer_position() as usize;
        let event = reader
            .read_event()
            .map_err(|e| parse_error(xml, reader.error_position() as usize, e.to_string()))?;
        let pos = reader.buffer_position() as usize;
        match event {
            Event::Start(ref e) | Event::Empty(ref e) => {
                let is_empty = matches!(event, Event::Empty(_));
                let name = e.name();
                let name = name.as_ref();
                if !seen_root {
                    if name != b"osm" {
                        return Err(parse_error(xml, before, "root element must be <osm>"));
                    }
                    seen_root = true;
                    if is_empty {
                        break;
                    }
                    continue;
                }
                match (&mut current, name) {
                    (None, b"bounds") => {
                        let b = Bounds {
                            min_lat: float_attr(xml, pos, e, "minlat")?,
                            min_lon: float_attr(xml, pos, e, "minlon")?,
                            max_lat: float_attr(xml, pos, e, "maxlat")?,
                            max_lon: float_attr(xml, pos, e, "maxlon")?,
                        };
                        model.declared_bounds = Some(b);
                        if !is_empty {
                            reader
                                .read_to_end(e.name())
                                .map_err(|err| parse_error(xml, pos, err.to_string()))?;
                        }
                    }
                    (None, b"node") => {
                        let id = int_attr(xml, pos, e, "id")?;
                        let lat = float_attr(xml, pos, e, "lat")?;
                        let lon = float_attr(xml, pos, e, "lon")?;
                        let location = GeoPoint::new(lat, lon)?;
                        let el = Element::Node {
                            id,
                            location,
                            tags: Tags::new(),
                        };
                        if is_empty {
                            finish(&mut model, el, xml, pos)?;
                        } else {
                            current = Some(el);
                        }
                    }
                    (None, b"way") => {
                        let id = int_attr(xml, pos, e, "id")?;
                        let el = Element::Way {
                            id,
                            refs: Vec::new(),
                            tags: Tags::new(),
                        };
                        if is_empty {
                            finish(&mut model, el, xml, pos)?;
                        } else {
                            current = Some(el);
                        }
                    }
                    (None, _) => {
                        let end = if is_empty {
                            pos
                        } else {
                            reader
                                .read_to_end(e.name())
                                .map_err(|err| parse_error(xml, pos, err.to_string()))?;
                            reader.buffer_position() as usize
                        };
                        let raw = std::str::from_utf8(&xml[before..end])
                            .map_err(|err| parse_error(xml, before, err.to_string()))?;
                        model.extra.push(raw.trim().to_string());
                    }
                    (Some(el), b"tag") => {
                        let k = str_attr(xml, pos, e, "k")?;
                        let v = str_attr(xml, pos, e, "v")?;
                        el.tags_mut().insert(k, v);
                        if !is_empty {
                            reader
                                .read_to_end(e.name())
                                .map_err(|err| parse_error(xml, pos, err.to_string()))?;
                        }
                    }
                    (Some(Element::Way { refs, .. }), b"nd") => {
                        let r = int_attr(xml, pos, e, "ref")?;
                        if refs.last() != Some(&r) {
                            refs.push(r);
                        }
                        if !is_empty {
                            reader
                                .read_to_end(e.name())
                                .map_err(|err| parse_error(xml, pos, err.to_string()))?;
                        }
                    }
                    (Some(_), _) => {
                        if !is_empty {
                            reader
                                .read_to_end(e.name())
                                .map_err(|err| parse_error(xml, pos, err.to_string()))?;
                        }
                    }
                }
            }
            Event::End(ref e) => match (current.take(), e.name().as_ref()) {
                (Some(el), b"node") | (Some(el), b"way") => finish(&mut model, el, xml, pos)?,
                (None, b"osm") => break,
                (other, _) => current = other,
            },
            Event::Eof => {
                if !seen_root {
                    return Err(parse_error(xml, pos, "missing <osm> root element"));
                }
                return Err(parse_error(xml, pos, "unexpected end of document"));
            }
            _ => {}
        }
    }

    model.validate()?;
    Ok(model)
}

enum Element {
    Node {
        id: NodeId,
        location: GeoPoint,
        tags: Tags,
    },
    Way {
        id: i64,
        refs: Vec<NodeId>,
        tags: Tags,
    },
}

impl Element {
    fn tags_mut(&mut self) -> &mut Tags {
        match self {
            Element::Node { tags, .. } | Element::Way { tags, .. } => tags,
        }
    }
}

fn finish(model: &mut OsmModel, el: Element, xml: &[u8], pos: usize) -> Result<(), OsmError> {
    match el {
        Element::Node { id, location, tags } => {
            if model.nodes.contains_key(&id) {
                return Err(parse_error(xml, pos, format!("duplicate node id {id}")));
            }
            model.add_node(id, location, tags);
        }
        Element::Way { id, refs, tags } => {
            if model.ways.contains_key(&id) {
                return Err(parse_error(xml, pos, format!("duplicate way id {id}")));
            }
            model.add_way(id, refs, tags);
        }
    }
    Ok(())
}

fn raw_attr(xml: &[u8], pos: usize, e: &BytesStart<'_>, key: &str) -> Result<String, OsmError> {
    for attr in e.attributes() {
        let attr = attr.map_err(|err| parse_error(xml, pos, err.to_string()))?;
        if attr.key.as_ref() == key.as_bytes() {
            return attr
                .unescape_value()
                .map(|v| v.into_owned())
                .map_err(|err| parse_error(xml, pos, err.to_string()));
        }
    }
    let name = String::from_utf8_lossy(e.name().as_ref()).into_owned();
    Err(parse_error(
        xml,
        pos,
        format!("<{name}> is missing attribute {key:?}"),
    ))
}

fn str_attr(xml: &[u8], pos: usize, e: &BytesStart<'_>, key: &str) -> Result<String, OsmError> {
    raw_attr(xml, pos, e, key)
}

fn int_attr(xml: &[u8], pos: usize, e: &BytesStart<'_>, key: &str) -> Result<i64, OsmError> {
    let raw = raw_attr(xml, pos, e, key)?;
    raw.trim()
        .parse()
        .map_err(|_| parse_error(xml, pos, format!("attribute {key}={raw:?} is not an integer")))
}

fn float_attr(xml: &[u8], pos: usize, e: &BytesStart<'_>, key: &str) -> Result<f64, OsmError> {
    let raw = raw_attr(xml, pos, e, key)?;
    raw.trim()
        .parse()
        .map_err(|_| parse_error(xml, pos, format!("attribute {key}={raw:?} is not a number")))
}

fn parse_error(xml: &[u8], offset: usize, message: impl Into<String>) -> OsmError {
    let offset = offset.min(xml.len());
    let prefix = &xml[..offset];
    let line = prefix.iter().filter(|&&b| b == b'\n').count() + 1;
    let line_start = prefix
        .iter()
        .rposition(|&b| b == b'\n')
        .map_or(0, |p| p + 1);
    OsmError::Parse {
        line,
        column: offset - line_start + 1,
        message: message.into(),
    }
}

/// Serializes a model: bounds, nodes by ascending id, ways by ascending id,
/// then preserved elements. Coordinates are written with 7 decimals.
pub fn write_osm(model: &OsmModel) -> Result<Vec<u8>, OsmError> {
    model.validate()?;
    let mut out = String::with_capacity(128 + model.nodes.len() * 80 + model.ways.len() * 120);
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(out, "<osm version=\"0.6\" generator=\"{GENERATOR}\">");
    let b = model.bounds().unwrap_or(Bounds {
        min_lat: 0.0,
        min_lon: 0.0,
        max_lat: 0.0,
        max_lon: 0.0,
    });
    let _ = writeln!(
        out,
        "  <bounds minlat=\"{:.7}\" minlon=\"{:.7}\" maxlat=\"{:.7}\" maxlon=\"{:.7}\"/>",
        b.min_lat, b.min_lon, b.max_lat, b.max_lon
    );
    for node in model.nodes.values() {
        let _ = write!(
            out,
            "  <node id=\"{}\" lat=\"{:.7}\" lon=\"{:.7}\"",
            node.id, node.location.lat, node.location.lon
        );
        if node.tags.is_empty() {
            out.push_str("/>\n");
        } else {
            out.push_str(">\n");
            write_tags(&mut out, &node.tags);
            out.push_str("  </node>\n");
        }
    }
    for way in model.ways.values() {
        let _ = writeln!(out, "  <way id=\"{}\">", way.id);
        for r in &way.node_refs {
            let _ = writeln!(out, "    <nd ref=\"{r}\"/>");
        }
        write_tags(&mut out, &way.tags);
        out.push_str("  </way>\n");
    }
    for raw in &model.extra {
        let _ = writeln!(out, "  {raw}");
    }
    out.push_str("</osm>\n");
    Ok(out.into_bytes())
}

fn write_tags(out: &mut String, tags: &Tags) {
    for (k, v) in tags.iter() {
        let _ = writeln!(out, "    <tag k=\"{}\" v=\"{}\"/>", escape(k), escape(v));
    }
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            '\n' => out.push_str("&#10;"),
            '\r' => out.push_str("&#13;"),
            '\t' => out.push_str("&#9;"),
            c => out.push(c),
        }
    }
    out
}
