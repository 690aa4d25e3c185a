#!/usr/bin/env python3
"""Regenerates the bundled world files under worlds/."""

import pathlib

OUT = pathlib.Path(__file__).resolve().parent.parent / "worlds"


class Grid:
    def __init__(self, w, h, cell):
        self.w, self.h, self.cell = w, h, cell
        self.c = [["." for _ in range(w)] for _ in range(h)]  # indexed [iy][ix], iy = 0 at the bottom

    def rect(self, x0, y0, x1, y1, ch="#"):
        """Fill cells x0..x1, y0..y1 inclusive."""
        for y in range(y0, y1 + 1):
            for x in range(x0, x1 + 1):
                self.c[y][x] = ch

    def border(self):
        self.rect(0, 0, self.w - 1, 0)
        self.rect(0, self.h - 1, self.w - 1, self.h - 1)
        self.rect(0, 0, 0, self.h - 1)
        self.rect(self.w - 1, 0, self.w - 1, self.h - 1)

    def write(self, name):
        lines = [f"{self.w} {self.h} {self.cell:g}"]
        for y in range(self.h - 1, -1, -1):
            lines.append("".join(self.c[y]))
        (OUT / name).write_text("\n".join(lines) + "\n")


def office():
    # 50 m x 20 m: a 3 m corridor along the middle with five rooms on each side.
    g = Grid(200, 80, 0.25)
    g.border()
    g.rect(1, 33, 198, 33)   # corridor south wall
    g.rect(1, 46, 198, 46)   # corridor north wall
    for x in (40, 80, 120, 160):
        g.rect(x, 1, x, 32)
        g.rect(x, 47, x, 78)
    # Doors, 1.5 m wide, at different offsets per room.
    south_doors = [8, 62, 96, 131, 176]
    north_doors = [28, 50, 104, 146, 170]
    for x in south_doors:
        g.rect(x, 33, x + 5, 33, ".")
    for x in north_doors:
        g.rect(x, 46, x + 5, 46, ".")
    # Furniture: desks and cabinets away from the doors.
    desks = [
        (12, 12, 23, 15), (26, 22, 29, 29),          # room S1
        (50, 6, 61, 9), (68, 20, 75, 23),            # room S2
        (86, 14, 93, 25),                            # room S3
        (126, 6, 141, 9), (144, 18, 147, 28),        # room S4
        (166, 10, 173, 13), (182, 20, 193, 23),      # room S5
        (8, 60, 19, 63), (30, 70, 37, 73),           # room N1
        (58, 66, 73, 69),                            # room N2
        (90, 56, 93, 67), (108, 72, 115, 75),        # room N3
        (128, 60, 139, 63),                          # room N4
        (176, 62, 179, 73), (186, 54, 193, 57),      # room N5
    ]
    for d in desks:
        g.rect(*d)
    g.rect(4, 39, 4, 39, "S")
    g.write("office.world")


def tiny():
    # 5 m x 5 m empty room.
    g = Grid(20, 20, 0.25)
    g.border()
    g.rect(10, 10, 10, 10, "S")
    g.write("tiny.world")


def sealed():
    # 20 m x 12 m hall with a closed 4 m x 4 m room that has no door.
    g = Grid(80, 48, 0.25)
    g.border()
    g.rect(50, 14, 66, 14)
    g.rect(50, 30, 66, 30)
    g.rect(50, 14, 50, 30)
    g.rect(66, 14, 66, 30)
    g.rect(20, 20, 27, 27)  # pillar block
    g.rect(6, 24, 6, 24, "S")
    g.write("sealed.world")


if __name__ == "__main__":
    OUT.mkdir(exist_ok=True)
    office()
    tiny()
    sealed()
