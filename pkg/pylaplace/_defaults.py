import os
import re
import xml.etree.ElementTree as ET


class LaplaceDefaults:
    """
    A class to easy access to the numerical defaults stored in the XML file.

    Attributes
    ----------
    root : xml.etree.ElementTree.Element
        The root element of the parsed XML tree.
    """

    def __init__(self, xml_file):
        """
        Initialize the LaplaceDefaults object by parsing the XML file.

        :param xml_file: Path to the XML file containing the defaults.
        :type xml_file: str
        """
        tree = ET.parse(xml_file)
        self.root = tree.getroot()

    def get(self, section, attribute=None):
        """
        Retrieve a default value, converted to int, float or tuple of ints depending on its text.

        :param section: The section to look into (e.g., 'Critical', 'Quadrature', 'ProofMirror').
        :type section: str
        :param attribute: The attribute to retrieve. If None, the section element is returned.
        :type attribute: str, optional
        :return: The requested value or element.
        :rtype: int, float, tuple or xml.etree.ElementTree.Element
        :raises ValueError: If the section or attribute is not found.
        """
        element = self.root.find(f"./{section}")
        if element is None:
            raise ValueError(f"Section not found for query: {section}")
        if attribute is None:
            return element

        raw = element.get(attribute)
        if raw is None:
            raise ValueError(f"Attribute '{attribute}' not found for query: {section}")
        return self._convert(raw)

    @staticmethod
    def _convert(raw):
        """
        Convert the attribute text into a python number or a tuple of ints.

        :param raw: Attribute text.
        :type raw: str
        :return: The converted value.
        :rtype: int, float or tuple
        """
        if "," in raw:
            return tuple(int(item) for item in raw.split(","))
        if re.fullmatch(r"[-+]?\d+", raw):
            return int(raw)
        return float(raw)


# Initialize the LaplaceDefaults object with the path to the XML file
DEFAULTS = LaplaceDefaults(os.path.join(os.path.dirname(__file__), "./Defaults.xml"))
