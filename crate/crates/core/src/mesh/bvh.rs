use super::{segment_triangle_hit, Segment, Shear, TriMesh};
use crate::geom3d::Vec3;

/// Triangles per leaf, at most.
const MAX_LEAF_SIZE: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aabb {
    pub min: Vec3,
    pub max: Vec3,
}

impl Aabb {
    pub fn point(p: &Vec3) -> Self {
        Aabb { min: *p, max: *p }
    }

    pub fn grown(&self, p: &Vec3) -> Self {
        Aabb { min: self.min.inf(p), max: self.max.sup(p) }
    }

    pub fn union(&self, other: &Aabb) -> Self {
        Aabb { min: self.min.inf(&other.min), max: self.max.sup(&other.max) }
    }

    pub fn of_triangle(tri: &[Vec3; 3]) -> Self {
        Aabb::point(&tri[0]).grown(&tri[1]).grown(&tri[2])
    }

    pub fn extent(&self) -> Vec3 {
        self.max - self.min
    }

    pub fn contains(&self, other: &Aabb) -> bool {
        (0..3).all(|i| self.min[i] <= other.min[i] && self.max[i] >= other.max[i])
    }

    /// Grows the box by a relative margin so the slab test stays
    /// conservative with respect to the triangle test under rounding.
    fn padded(&self) -> Self {
        let pad = Vec3::from_element(1e-9 * (1.0 + self.extent().amax()));
        Aabb { min: self.min - pad, max: self.max + pad }
    }

    /// Slab test of `origin + t dir` for `t ∈ [t_min, t_max]`.
    fn overlaps_segment(&self, origin: &Vec3, inv_dir: &Vec3, t_min: f64, t_max: f64) -> bool {
        let mut lo = t_min;
        let mut hi = t_max;
        for i in 0..3 {
            let inv = inv_dir[i];
            if inv.is_infinite() {
                // Parallel to this slab.
                if origin[i] < self.min[i] || origin[i] > self.max[i] {
                    return false;
                }
                continue;
            }
            let t0 = (self.min[i] - origin[i]) * inv;
            let t1 = (self.max[i] - origin[i]) * inv;
            let (near, far) = if t0 <= t1 { (t0, t1) } else { (t1, t0) };
            lo = lo.max(near);
            hi = hi.min(far);
            if lo > hi {
                return false;
            }
        }
        true
    }
}

#[derive(Debug, Clone)]
enum NodeKind {
    Leaf { start: u32, count: u32 },
    Inner { left: u32, right: u32 },
}

#[derive(Debug, Clone)]
struct Node {
    bounds: Aabb,
    kind: NodeKind,
}

/// Bounding volume hierarchy over a [`TriMesh`], built by splitting at the
/// centroid median along the longest centroid-extent axis.
#[derive(Debug, Clone)]
pub struct Bvh {
    mesh: TriMesh,
    nodes: Vec<Node>,
    /// Triangle indices in leaf order.
    order: Vec<u32>,
    /// Triangle corners in leaf order.
    tris: Vec<[Vec3; 3]>,
}

impl Bvh {
    pub fn build(mesh: TriMesh) -> Self {
        let n = mesh.triangles.len();
        let mut bvh = Bvh { nodes: Vec::new(), order: (0..n as u32).collect(), tris: Vec::new(), mesh };
        if n > 0 {
            let centroids: Vec<Vec3> = (0..n)
                .map(|i| {
                    let [a, b, c] = bvh.mesh.triangle(i);
                    (a + b + c) / 3.0
                })
                .collect();
            let mut order = std::mem::take(&mut bvh.order);
            bvh.build_node(&mut order, 0, &centroids);
            bvh.order = order;
            bvh.tris = bvh.order.iter().map(|&i| bvh.mesh.triangle(i as usize)).collect();
        }
        bvh
    }

    fn build_node(&mut self, order: &mut [u32], start: usize, centroids: &[Vec3]) -> u32 {
        let bounds = order
            .iter()
            .map(|&i| Aabb::of_triangle(&self.mesh.triangle(i as usize)))
            .reduce(|a, b| a.union(&b))
            .expect("non-empty node")
            .padded();
        let index = self.nodes.len() as u32;
        if order.len() <= MAX_LEAF_SIZE {
            self.nodes.push(Node {
                bounds,
                kind: NodeKind::Leaf { start: start as u32, count: order.len() as u32 },
            });
            return index;
        }
        self.nodes.push(Node { bounds, kind: NodeKind::Leaf { start: 0, count: 0 } });

        let cbounds = order
            .iter()
            .map(|&i| Aabb::point(&centroids[i as usize]))
            .reduce(|a, b| a.union(&b))
            .expect("non-empty node");
        let axis = cbounds.extent().imax();
        let mid = order.len() / 2;
        order.select_nth_unstable_by(mid, |&a, &b| {
            centroids[a as usize][axis].total_cmp(&centroids[b as usize][axis])
        });
        let (lo, hi) = order.split_at_mut(mid);
        let left = self.build_node(lo, start, centroids);
        let right = self.build_node(hi, start + mid, centroids);
        self.nodes[index as usize].kind = NodeKind::Inner { left, right };
        index
    }

    pub fn mesh(&self) -> &TriMesh {
        &self.mesh
    }

    pub fn bounds(&self) -> Option<Aabb> {
        self.nodes.first().map(|n| n.bounds)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Triangle indices (into the source mesh) of every leaf.
    pub fn leaves(&self) -> impl Iterator<Item = &[u32]> + '_ {
        self.nodes.iter().filter_map(move |n| match n.kind {
            NodeKind::Leaf { start, count } => {
                Some(&self.order[start as usize..(start + count) as usize])
            }
            NodeKind::Inner { .. } => None,
        })
    }

    /// Checks that every node's box contains its children and its leaf
    /// triangles. Used by tests and debug assertions.
    pub fn check_bounds(&self) -> bool {
        self.nodes.iter().all(|n| match n.kind {
            NodeKind::Leaf { start, count } => (start..start + count)
                .all(|i| n.bounds.contains(&Aabb::of_triangle(&self.tris[i as usize]))),
            NodeKind::Inner { left, right } => {
                n.bounds.contains(&self.nodes[left as usize].bounds)
                    && n.bounds.contains(&self.nodes[right as usize].bounds)
            }
        })
    }

    fn hits(&self, seg: &Segment, t_min: f64, t_max: f64) -> bool {
        if self.nodes.is_empty() || t_min > t_max {
            return false;
        }
        let dir = seg.direction();
        let Some(shear) = Shear::new(&dir) else {
            return false;
        };
        let inv_dir = dir.map(|d| 1.0 / d);
        let mut stack: Vec<u32> = Vec::with_capacity(64);
        stack.push(0);
        while let Some(ni) = stack.pop() {
            let node = &self.nodes[ni as usize];
            if !node.bounds.overlaps_segment(&seg.a, &inv_dir, t_min, t_max) {
                continue;
            }
            match node.kind {
                NodeKind::Leaf { start, count } => {
                    let tris = &self.tris[start as usize..(start + count) as usize];
                    if tris.iter().any(|t| segment_triangle_hit(&seg.a, &shear, t, t_min, t_max)) {
                        return true;
                    }
                }
                NodeKind::Inner { left, right } => {
                    stack.push(right);
                    stack.push(left);
                }
            }
        }
        false
    }
}

fn shrink_range(eps: f64) -> (f64, f64) {
    debug_assert!((0.0..0.5).contains(&eps), "segment eps must lie in [0, 0.5)");
    (eps, 1.0 - eps)
}

/// True iff some triangle crosses the segment at a parameter in
/// `[eps, 1 - eps]`. Zero-length segments never hit.
pub fn segment_hits(bvh: &Bvh, seg: &Segment, eps: f64) -> bool {
    let (lo, hi) = shrink_range(eps);
    bvh.hits(seg, lo, hi)
}

/// OR of [`segment_hits`] over several meshes.
pub fn segment_hits_any<'a>(bvhs: impl IntoIterator<Item = &'a Bvh>, seg: &Segment, eps: f64) -> bool {
    let (lo, hi) = shrink_range(eps);
    bvhs.into_iter().any(|b| b.hits(seg, lo, hi))
}

/// Exhaustive reference for [`segment_hits`].
pub fn segment_hits_bruteforce(mesh: &TriMesh, seg: &Segment, eps: f64) -> bool {
    let (lo, hi) = shrink_range(eps);
    let dir = seg.direction();
    let Some(shear) = Shear::new(&dir) else {
        return false;
    };
    (0..mesh.triangles.len()).any(|i| segment_triangle_hit(&seg.a, &shear, &mesh.triangle(i), lo, hi))
}
