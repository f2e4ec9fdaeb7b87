//! Canonical small instances used across the test suites and shipped as
//! JSON files under `fixtures/`.

use crate::grid::GridGraph;

/// Full 3x2 rectangle: {(x,y) : 0<=x<=2, 0<=y<=1}.
pub fn rect_3x2() -> GridGraph {
    GridGraph::build(&rect_points(3, 2)).unwrap()
}

/// 3x3 square minus its center: an 8-node ring around one inner hole.
pub fn donut() -> GridGraph {
    GridGraph::build(&donut_points()).unwrap()
}

/// 5x3 rectangle minus (1,1) and (3,1): two inner holes separated by the
/// x=2 column.
pub fn double_donut() -> GridGraph {
    GridGraph::build(&double_donut_points()).unwrap()
}

/// Horizontal path {0..4} x {0}.
pub fn path_5() -> GridGraph {
    GridGraph::build(&path_points(5)).unwrap()
}

pub fn rect_points(w: i32, h: i32) -> Vec<(i32, i32)> {
    let mut pts = Vec::new();
    for x in 0..w {
        for y in 0..h {
            pts.push((x, y));
        }
    }
    pts
}

pub fn donut_points() -> Vec<(i32, i32)> {
    rect_points(3, 3).into_iter().filter(|&p| p != (1, 1)).collect()
}

pub fn double_donut_points() -> Vec<(i32, i32)> {
    rect_points(5, 3)
        .into_iter()
        .filter(|&p| p != (1, 1) && p != (3, 1))
        .collect()
}

pub fn path_points(len: i32) -> Vec<(i32, i32)> {
    (0..len).map(|x| (x, 0)).collect()
}

/// L-shaped three-node fixture {(0,0),(1,0),(1,1)}.
pub fn l_shape() -> GridGraph {
    GridGraph::build(&[(0, 0), (1, 0), (1, 1)]).unwrap()
}
