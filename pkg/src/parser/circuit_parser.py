"""
Circuit and gate config parser
Reads JSON circuit descriptions and CNOT gate configurations
"""
import json
from pathlib import Path
from typing import Dict, List, Optional

from src.gate.cnot import CnotConfig, DetectorModel
from src.optics.detection import Condition, DetectorSpec
from src.optics.elements import BeamSplitter, Circuit, Element, LossChannel
from src.utils.exceptions import ConfigurationError, DimensionError, FockHeraldError, ParsingError


def _read_document(file_path: Path) -> Dict:
    try:
        with open(file_path, 'r', encoding='utf-8') as f:
            content = f.read()
    except Exception as e:
        raise ParsingError(f"Unable to read file: {e}")

    if not content.strip():
        raise ParsingError(f"{Path(file_path).name} is empty")

    try:
        document = json.loads(content)
    except json.JSONDecodeError as e:
        raise ParsingError(f"Invalid JSON in {Path(file_path).name}: {e}")

    if not isinstance(document, dict):
        raise ParsingError("Top-level JSON value must be an object")
    return document


class CircuitParser:
    """Parse circuit documents into Circuit values"""

    ELEMENT_TYPES = {'beamsplitter', 'loss'}

    def __init__(self):
        self.warnings: List[str] = []

    def parse(self, file_path: Path) -> Circuit:
        """
        Parse a circuit JSON file

        Args:
            file_path: Path to the JSON document

        Returns:
            Circuit

        Raises:
            ParsingError: If the file cannot be read or describes no valid circuit
        """
        return self.parse_document(_read_document(file_path))

    def parse_document(self, document: Dict) -> Circuit:
        """Build a Circuit from an already decoded document"""
        if 'mode_count' not in document:
            raise ParsingError("Circuit document needs 'mode_count'")

        try:
            elements    = [
                self._parse_element(i, e) for i, e in enumerate(document.get('elements', []))
            ]
            detectors   = [
                self._parse_detector(i, d) for i, d in enumerate(document.get('detectors', []))
            ]
            return Circuit(
                int(document['mode_count']),
                tuple(elements),
                tuple(detectors),
                name=str(document.get('name', ''))
            )
        except ParsingError:
            raise
        except (FockHeraldError, KeyError, TypeError, ValueError) as e:
            raise ParsingError(f"Invalid circuit: {e}")

    def get_warnings(self) -> List[str]:
        return self.warnings

    def _parse_element(self, index: int, item: Dict) -> Element:
        kind = item.get('type', 'beamsplitter')
        if kind not in self.ELEMENT_TYPES:
            raise ParsingError(f"Element {index}: unknown type '{kind}'")

        if kind == 'loss':
            return LossChannel(int(item['mode']), float(item['transmission']))

        reflectivity = float(item['reflectivity'])
        if reflectivity in (0.0, 1.0):
            self.warnings.append(
                f"Element {index}: reflectivity {reflectivity:g} does not mix modes"
            )
        return BeamSplitter(
            int(item['mode_a']), int(item['mode_b']), reflectivity, str(item.get('label', ''))
        )

    def _parse_detector(self, index: int, item: Dict) -> DetectorSpec:
        try:
            condition = Condition(item.get('condition', Condition.CLICK.value))
        except ValueError:
            raise ParsingError(f"Detector {index}: unknown condition '{item.get('condition')}'")

        count = item.get('count')
        return DetectorSpec(
            int(item['mode']),
            float(item.get('efficiency', 1.0)),
            condition,
            None if count is None else int(count)
        )


def circuit_to_document(circuit: Circuit) -> Dict:
    """Inverse of CircuitParser.parse_document"""
    elements = []
    for element in circuit.elements:
        if isinstance(element, LossChannel):
            elements.append({
                'type': 'loss',
                'mode': element.mode,
                'transmission': element.transmission,
            })
        else:
            elements.append({
                'type': 'beamsplitter',
                'mode_a': element.mode_a,
                'mode_b': element.mode_b,
                'reflectivity': element.reflectivity,
                'label': element.label,
            })

    detectors = []
    for detector in circuit.detectors:
        entry = {
            'mode': detector.mode,
            'efficiency': detector.efficiency,
            'condition': detector.condition.value,
        }
        if detector.count is not None:
            entry['count'] = detector.count
        detectors.append(entry)

    return {
        'name': circuit.name,
        'mode_count': circuit.mode_count,
        'elements': elements,
        'detectors': detectors,
    }


class GateConfigParser:
    """Parse CNOT gate configuration files"""

    def parse(self, file_path: Path, detector_model: Optional[DetectorModel] = None) -> CnotConfig:
        """
        Parse a gate config JSON file

        Args:
            file_path: Path to the JSON document
            detector_model: Overrides the document's detector model

        Returns:
            CnotConfig

        Raises:
            ParsingError: If the file cannot be read or the config is malformed
        """
        document = _read_document(file_path)
        try:
            return CnotConfig.from_dict(document, detector_model)
        except (ConfigurationError, DimensionError) as e:
            raise ParsingError(f"{Path(file_path).name}: {e}")

    @staticmethod
    def write(cfg: CnotConfig, file_path: Path) -> None:
        try:
            with open(file_path, 'w', encoding='utf-8') as f:
                json.dump(cfg.to_dict(), f, indent=2, sort_keys=True)
                f.write('\n')
        except OSError as e:
            raise ParsingError(f"Unable to write gate config: {e}")
