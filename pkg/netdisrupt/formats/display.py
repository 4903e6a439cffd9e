"""Plain-text rendering of bounds for the terminal."""

from netdisrupt.core.models import BoundInterval, DpoCellTable, SharpSet


class ResultDisplay:
    """Display intervals, cell tables and sharp sets."""

    @staticmethod
    def display_interval(bound: BoundInterval, label: str = "") -> str:
        """Display a bound as ``label [lower, upper]`` with its binding terms.

        Args:
            bound: The interval to display
            label: Optional prefix

        Returns:
            One-line summary
        """
        prefix = f"{label}: " if label else ""
        return (
            f"{prefix}[{bound.lower:.6f}, {bound.upper:.6f}]"
            f"  (lower: {bound.lower_active.value}, upper: {bound.upper_active.value})"
        )

    @staticmethod
    def display_cell_table(table: DpoCellTable) -> str:
        """Display a cell table as rows of ``lower-upper`` pairs.

        Args:
            table: The table to display

        Returns:
            ASCII table with Y1 values down the side and Y0 values across the top
        """
        width = 17
        header = "Y1 \\ Y0".ljust(10) + "".join(f"{b:g}".center(width) for b in table.support0)
        lines = [header, "-" * len(header)]

        for i, a in enumerate(table.support1):
            row_str = f"{a:g}".ljust(10)
            for cell in table.cells[i]:
                row_str += f"{cell.lower:.4f}-{cell.upper:.4f}".center(width)
            lines.append(row_str)

        lower, upper = table.altered_fraction()
        lines.append("")
        lines.append(f"altered dyads: [{lower:.4f}, {upper:.4f}]")
        return "\n".join(lines)

    @staticmethod
    def display_sharp_set(result: SharpSet, label: str = "", full: bool = True) -> str:
        """Display a sharp set; only the extremes when ``full`` is false."""
        prefix = f"{label}: " if label else ""
        if full:
            values = ", ".join(f"{v:g}" for v in result.values)
            return f"{prefix}{{{values}}} over {result.n_permutations} matchings"
        span = f"min {result.min:g}, max {result.max:g}"
        return f"{prefix}{span} over {result.n_permutations} matchings"
