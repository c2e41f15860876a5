use std::collections::BTreeMap;

use crate::geo::GeoPoint;

use super::OsmError;

pub type NodeId = i64;
pub type WayId = i64;

const NON_TRAVELLABLE_HIGHWAYS: [&str; 12] = [
    "motorway",
    "motorway_link",
    "trunk",
    "trunk_link",
    "construction",
    "proposed",
    "abandoned",
    "platform",
    "raceway",
    "bus_guideway",
    "escape",
    "elevator",
];

/// Key/value tags in insertion order. Keys are unique.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Tags(Vec<(String, String)>);

impl Tags {
    pub fn new() -> Self {
        Tags(Vec::new())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn has(&self, key: &str, value: &str) -> bool {
        self.get(key) == Some(value)
    }

    /// Sets `key`, keeping its original position if it already exists.
    pub fn insert(&mut self, key: impl Into<String>, value: impl Into<String>) {
        let key = key.into();
        let value = value.into();
        match self.0.iter_mut().find(|(k, _)| *k == key) {
            Some(slot) => slot.1 = value,
            None => self.0.push((key, value)),
        }
    }

    pub fn remove(&mut self, key: &str) -> Option<String> {
        let pos = self.0.iter().position(|(k, _)| k == key)?;
        Some(self.0.remove(pos).1)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.0.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl<K: Into<String>, V: Into<String>> FromIterator<(K, V)> for Tags {
    fn from_iter<I: IntoIterator<Item = (K, V)>>(iter: I) -> Self {
        let mut tags = Tags::new();
        for (k, v) in iter {
            tags.insert(k, v);
        }
        tags
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OsmNode {
    pub id: NodeId,
    pub location: GeoPoint,
    pub tags: Tags,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OsmWay {
    pub id: WayId,
    pub node_refs: Vec<NodeId>,
    pub tags: Tags,
}

impl OsmWay {
    /// Declared `width` tag in meters, if it parses as a positive number.
    /// Accepts a trailing `m` unit.
    pub fn width(&self) -> Option<f64> {
        let raw = self.tags.get("width")?.trim();
        let raw = raw.strip_suffix('m').unwrap_or(raw).trim();
        raw.parse::<f64>().ok().filter(|w| w.is_finite() && *w > 0.0)
    }

    /// Whether pedestrians may use this way.
    pub fn is_travellable(&self) -> bool {
        let Some(highway) = self.tags.get("highway") else {
            return false;
        };
        if NON_TRAVELLABLE_HIGHWAYS.contains(&highway) || self.tags.has("area", "yes") {
            return false;
        }
        if self.tags.has("foot", "no") {
            return false;
        }
        let restricted = matches!(self.tags.get("access"), Some("no" | "private"));
        !restricted || matches!(self.tags.get("foot"), Some("yes" | "designated" | "permissive"))
    }

    pub fn is_closed(&self) -> bool {
        self.node_refs.len() > 2 && self.node_refs.first() == self.node_refs.last()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub min_lat: f64,
    pub min_lon: f64,
    pub max_lat: f64,
    pub max_lon: f64,
}

impl Bounds {
    pub fn around(p: GeoPoint) -> Bounds {
        Bounds {
            min_lat: p.lat,
            min_lon: p.lon,
            max_lat: p.lat,
            max_lon: p.lon,
        }
    }

    pub fn extend(&mut self, p: GeoPoint) {
        self.min_lat = self.min_lat.min(p.lat);
        self.min_lon = self.min_lon.min(p.lon);
        self.max_lat = self.max_lat.max(p.lat);
        self.max_lon = self.max_lon.max(p.lon);
    }

    pub fn union(mut self, other: Bounds) -> Bounds {
        self.extend(GeoPoint {
            lat: other.min_lat,
            lon: other.min_lon,
        });
        self.extend(GeoPoint {
            lat: other.max_lat,
            lon: other.max_lon,
        });
        self
    }

    pub fn contains(&self, p: GeoPoint) -> bool {
        (self.min_lat..=self.max_lat).contains(&p.lat)
            && (self.min_lon..=self.max_lon).contains(&p.lon)
    }

    pub fn centroid(&self) -> GeoPoint {
        GeoPoint {
            lat: (self.min_lat + self.max_lat) / 2.0,
            lon: (self.min_lon + self.max_lon) / 2.0,
        }
    }
}

/// In-memory OSM document. Nodes and ways are keyed (and serialized) by id.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct OsmModel {
    pub nodes: BTreeMap<NodeId, OsmNode>,
    pub ways: BTreeMap<WayId, OsmWay>,
    /// Declared `<bounds>`, if the source document had one.
    pub declared_bounds: Option<Bounds>,
    /// Top-level elements other than nodes and ways (relations, ...), kept
    /// verbatim so they survive a round trip.
    pub extra: Vec<String>,
}

impl OsmModel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self, id: NodeId, location: GeoPoint, tags: Tags) {
        self.nodes.insert(id, OsmNode { id, location, tags });
    }

    pub fn add_way(&mut self, id: WayId, node_refs: Vec<NodeId>, tags: Tags) {
        self.ways.insert(id, OsmWay { id, node_refs, tags });
    }

    pub fn node_location(&self, id: NodeId) -> Option<GeoPoint> {
        self.nodes.get(&id).map(|n| n.location)
    }

    /// Declared bounds widened to cover every node.
    pub fn bounds(&self) -> Option<Bounds> {
        let from_nodes = self.node_bounds(|_| true);
        match (self.declared_bounds, from_nodes) {
            (Some(d), Some(n)) => Some(d.union(n)),
            (d, n) => d.or(n),
        }
    }

    /// Extent of the nodes selected by `filter`.
    pub fn node_bounds(&self, filter: impl Fn(&OsmNode) -> bool) -> Option<Bounds> {
        let mut it = self.nodes.values().filter(|n| filter(n));
        let mut b = Bounds::around(it.next()?.location);
        for n in it {
            b.extend(n.location);
        }
        Some(b)
    }

    /// Checks coordinates and referential integrity.
    pub fn validate(&self) -> Result<(), OsmError> {
        for node in self.nodes.values() {
            node.location.validate()?;
        }
        for way in self.ways.values() {
            if way.node_refs.len() < 2 {
                return Err(OsmError::DegenerateWay { way_id: way.id });
            }
            for &r in &way.node_refs {
                if !self.nodes.contains_key(&r) {
                    return Err(OsmError::Integrity {
                        way_id: way.id,
                        node_ref: r,
                    });
                }
            }
            if way.node_refs.windows(2).any(|w| w[0] == w[1]) {
                return Err(OsmError::DegenerateWay { way_id: way.id });
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tags_keep_insertion_order_and_replace_in_place() {
        let mut t = Tags::new();
        t.insert("b", "1");
        t.insert("a", "2");
        t.insert("b", "3");
        let got: Vec<_> = t.iter().collect();
        assert_eq!(got, vec![("b", "3"), ("a", "2")]);
        assert_eq!(t.remove("b").as_deref(), Some("3"));
        assert_eq!(t.len(), 1);
    }

    #[test]
    fn width_tag_parsing() {
        let mut w = OsmWay {
            id: 1,
            node_refs: vec![1, 2],
            tags: Tags::new(),
        };
        assert_eq!(w.width(), None);
        w.tags.insert("width", "6");
        assert_eq!(w.width(), Some(6.0));
        w.tags.insert("width", "2.5 m");
        assert_eq!(w.width(), Some(2.5));
        w.tags.insert("width", "wide");
        assert_eq!(w.width(), None);
        w.tags.insert("width", "-3");
        assert_eq!(w.width(), None);
    }

    #[test]
    fn travellable_ways() {
        let way = |tags: &[(&str, &str)]| OsmWay {
            id: 1,
            node_refs: vec![1, 2],
            tags: tags.iter().copied().collect(),
        };
        assert!(way(&[("highway", "footway")]).is_travellable());
        assert!(way(&[("highway", "residential")]).is_travellable());
        assert!(!way(&[("building", "yes")]).is_travellable());
        assert!(!way(&[("highway", "motorway")]).is_travellable());
        assert!(!way(&[("highway", "path"), ("foot", "no")]).is_travellable());
        assert!(!way(&[("highway", "service"), ("access", "private")]).is_travellable());
        assert!(way(&[("highway", "service"), ("access", "no"), ("foot", "yes")]).is_travellable());
    }

    #[test]
    fn dangling_reference_is_reported() {
        let mut m = OsmModel::new();
        m.add_node(1, GeoPoint::new(1.0, 1.0).unwrap(), Tags::new());
        m.add_way(7, vec![1, 2], Tags::new());
        assert_eq!(
            m.validate(),
            Err(OsmError::Integrity {
                way_id: 7,
                node_ref: 2
            })
        );
    }

    #[test]
    fn bounds_cover_declared_and_nodes() {
        let mut m = OsmModel::new();
        assert!(m.bounds().is_none());
        m.add_node(1, GeoPoint::new(1.0, 2.0).unwrap(), Tags::new());
        m.add_node(2, GeoPoint::new(3.0, 0.5).unwrap(), Tags::new());
        let b = m.bounds().unwrap();
        assert_eq!((b.min_lat, b.min_lon, b.max_lat, b.max_lon), (1.0, 0.5, 3.0, 2.0));
        m.declared_bounds = Some(Bounds::around(GeoPoint::new(-1.0, 0.0).unwrap()));
        assert_eq!(m.bounds().unwrap().min_lat, -1.0);
    }
}
