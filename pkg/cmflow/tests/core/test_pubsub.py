import logging
import pprint

import pytest

from cmflow.core import (Publisher, Subscriber, LoggingSubscriber, CMFlowError,
    ConfigurationError, GridMismatchError, ConvexityLostError, StepFailureError,
    ConvergenceError, InadmissiblePrescriptionError, SnapshotError)


class Subject(Publisher):
    pass


class Observer(Subscriber):
    def __init__(self, id):
        self.id = id
        self.seen = []

    def update(self, data):
        self.seen.append(pprint.pformat(data))

    def __repr__(self):
        return '%s(%r)' % (self.__class__.__name__, self.id)


def test_pubsub():
    s = Subject()
    foo = Observer('foo')
    bar = Observer('bar')
    s.attach(foo)
    s.attach(bar)
    s.attach(foo)

    data = [{'t': 0.0}, {'mu': [1, '2', list(range(3))]}]
    s.notify(data)
    s.notify(['foo', 'bar'])

    assert len(foo.seen) == 2
    assert foo.seen == bar.seen

    s.detach(bar)
    s.detach(bar)
    s.notify('baz')
    assert len(foo.seen) == 3
    assert len(bar.seen) == 2

    with pytest.raises(TypeError):
        s.attach('foo')


def test_abstract_subscriber():
    with pytest.raises(NotImplementedError):
        Subscriber().update(None)


def test_logging_subscriber(caplog):
    s = Subject()
    s.attach(LoggingSubscriber(logging.getLogger('cmflow.test'), logging.WARNING))
    with caplog.at_level(logging.WARNING, logger='cmflow.test'):
        s.notify('record 1')
    assert 'record 1' in caplog.text


def test_exception_hierarchy():
    for cls in (ConfigurationError, GridMismatchError, ConvexityLostError,
            StepFailureError, ConvergenceError, InadmissiblePrescriptionError,
            SnapshotError):
        assert issubclass(cls, CMFlowError)

    exc = ConvexityLostError('gone', margin=-0.5)
    assert exc.margin == -0.5
    assert str(exc) == 'gone'

    exc = ConvergenceError('stalled', state='s', tau=0.75)
    assert exc.state == 's'
    assert exc.tau == 0.75
