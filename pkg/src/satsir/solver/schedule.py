import csv
import io
import json
import logging

import attr

from satsir.utils import SatsirValueError, is_finite_real, write_csv


logger = logging.getLogger(__name__)


class ScheduleError(SatsirValueError):
    pass


def _check_segments(instance, attribute, value):
    if not value:
        raise ScheduleError('Schedule needs at least one segment')

    previous = None
    for i, (t_start, gamma) in enumerate(value):
        if not (is_finite_real(t_start) and is_finite_real(gamma)):
            raise ScheduleError(f'Segment {i} must hold finite numbers, got {(t_start, gamma)!r}')
        if not 0 <= gamma <= 1:
            raise ScheduleError(f'Segment {i} gamma must be in [0, 1], got {gamma!r}',
                                attr_name='gamma', attr_value=gamma)
        if previous is None and t_start != 0:
            raise ScheduleError(f'First segment must start at 0, got {t_start!r}',
                                attr_name='t_start', attr_value=t_start)
        if previous is not None and not t_start > previous:
            raise ScheduleError(f'Segment starts must increase strictly, {t_start!r} after {previous!r}',
                                attr_name='t_start', attr_value=t_start)
        previous = t_start


@attr.s(frozen=True)
class GammaSchedule:
    """
    Piecewise-constant cautiousness level: ``segments`` is a tuple of
    ``(t_start, gamma)`` pairs, each in force until the next start or
    ``t_end``. ``labels`` optionally names the event behind each segment.
    """

    segments = attr.ib(converter=lambda v: tuple((s[0], s[1]) for s in v), validator=_check_segments)
    t_end = attr.ib()
    labels = attr.ib(default=None, converter=attr.converters.optional(tuple))

    @t_end.validator
    def _check_t_end(self, attribute, value):
        if not is_finite_real(value) or not value > self.segments[-1][0]:
            raise ScheduleError(f't_end must exceed the last segment start, got {value!r}',
                                attr_name='t_end', attr_value=value)

    @labels.validator
    def _check_labels(self, attribute, value):
        if value is not None and len(value) != len(self.segments):
            raise ScheduleError('One label per segment is required')

    def __len__(self):
        return len(self.segments)

    def intervals(self):
        """Yield ``(t_start, t_stop, gamma)`` for every segment."""
        starts = [s[0] for s in self.segments] + [self.t_end]
        for (t_start, gamma), t_stop in zip(self.segments, starts[1:]):
            yield t_start, t_stop, gamma

    def _index_at(self, t):
        if not 0 <= t <= self.t_end:
            raise ScheduleError(f'Time {t!r} outside the schedule span [0, {self.t_end!r}]')
        index = 0
        for i, (t_start, _) in enumerate(self.segments):
            if t >= t_start:
                index = i
        return index

    def gamma_at(self, t):
        return self.segments[self._index_at(t)][1]

    def label_at(self, t):
        if self.labels is None:
            return None
        return self.labels[self._index_at(t)]

    def to_csv(self):
        return write_csv(('t_start', 'gamma'), self.segments, footer=('t_end', self.t_end))

    def to_dict(self):
        data = {
            'segments': [{'t_start': t, 'gamma': g} for t, g in self.segments],
            't_end': self.t_end,
        }
        if self.labels is not None:
            for segment, label in zip(data['segments'], self.labels):
                segment['label'] = label
        return data

    @classmethod
    def from_dict(cls, data):
        try:
            segments = [(s['t_start'], s['gamma']) for s in data['segments']]
            labels = [s.get('label') for s in data['segments']]
            t_end = data['t_end']
        except (KeyError, TypeError) as e:
            raise ScheduleError(f'Malformed schedule document: {e!r}') from e
        return cls(
            segments=segments,
            t_end=t_end,
            labels=labels if all(i is not None for i in labels) else None,
        )

    @classmethod
    def from_json(cls, text):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise ScheduleError(f'Invalid schedule JSON: {e}') from e
        return cls.from_dict(data)

    @classmethod
    def from_csv(cls, text):
        """
        Parse CSV with header ``t_start,gamma`` and a final ``t_end,<time>``
        row.

        :raises: ScheduleError on malformed input
        """
        rows = [r for r in csv.reader(io.StringIO(text)) if r and any(c.strip() for c in r)]
        if not rows or [c.strip() for c in rows[0]] != ['t_start', 'gamma']:
            raise ScheduleError('Schedule CSV must start with the header t_start,gamma')

        segments = []
        t_end = None
        for lineno, row in enumerate(rows[1:], start=2):
            if len(row) != 2:
                raise ScheduleError(f'Line {lineno}: expected two columns, got {len(row)}')
            key, value = (c.strip() for c in row)
            try:
                if key == 't_end':
                    if t_end is not None:
                        raise ScheduleError(f'Line {lineno}: duplicate t_end row')
                    t_end = float(value)
                    continue
                if t_end is not None:
                    raise ScheduleError(f'Line {lineno}: segment after the t_end row')
                segments.append((float(key), float(value)))
            except ValueError as e:
                if isinstance(e, ScheduleError):
                    raise
                raise ScheduleError(f'Line {lineno}: {e}') from e

        if t_end is None:
            raise ScheduleError('Schedule CSV lacks the t_end footer row')
        return cls(segments=segments, t_end=t_end)

    @classmethod
    def constant(cls, gamma, t_end):
        return cls(segments=[(0, gamma)], t_end=t_end)
